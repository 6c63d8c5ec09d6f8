import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgchannels.errors import DimensionMismatch, GeometryViolation
from kgchannels.geometry import (
    Ball,
    DoubleCone,
    Point,
    ScenarioGeometry,
    are_spacelike,
    contains,
    in_causal_set,
    rotate_ball,
    rotation_matrix,
)

coord = st.floats(-3, 3, allow_nan=False)
radius = st.floats(0.01, 2)


def cone(c, r):
    return DoubleCone(Ball(c, r))


def test_contains_center_of_base():
    assert contains(cone((0, 0, 0), 1), Point(0, (0, 0, 0)))


def test_contains_excludes_tip():
    assert not contains(cone((0, 0, 0), 1), Point(1, (0, 0, 0)))


def test_contains_shifted_cone():
    assert contains(cone((0.6, 0, 0), 0.5), Point(0.2, (0.6, 0, 0)))


def test_contains_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        contains(cone((0, 0), 1), Point(0, (0, 0, 0)))


def test_plus_minus_diamonds_are_spacelike():
    g = ScenarioGeometry(0.8, 1.2, 0.2, 0.5, d=3)
    assert are_spacelike(g.o_minus, g.o_plus)


def test_nested_and_identical_cones_not_spacelike():
    g = ScenarioGeometry(0.8, 1.2, 0.2, 0.5)
    assert not are_spacelike(g.inner, g.bob)
    assert not are_spacelike(g.bob, g.bob)


def test_in_causal_set_examples():
    o = cone((0, 0), 0.5)
    assert in_causal_set(o, Point(0.1, (0.2, 0.1)))
    assert in_causal_set(o, Point(10, (0, 0)))
    assert not in_causal_set(o, Point(0.1, (1.5, 0)))


def test_rotate_ball_examples():
    lam, s = 0.5, 0.2
    b = Ball((lam, 0, 0), s)
    flipped = rotate_ball(b, math.pi)
    assert np.allclose(flipped.center, (-lam, 0, 0), atol=1e-15) and flipped.radius == s
    assert rotate_ball(b, 0.0) == b
    assert np.allclose(rotate_ball(b, math.pi / 2).center, (0, lam, 0), atol=1e-15)


def test_rotation_matrix_axes():
    R = rotation_matrix(3, math.pi / 2, axis=0)
    assert np.allclose(R @ [0, 1, 0], [0, 0, 1])
    with pytest.raises(ValueError):
        rotation_matrix(3, 1.0, axis=5)


@given(coord, coord, radius, coord, coord, radius)
def test_spacelike_symmetric(a1, a2, ra, b1, b2, rb):
    a, b = cone((a1, a2), ra), cone((b1, b2), rb)
    assert are_spacelike(a, b) == are_spacelike(b, a)


@given(coord, coord, radius, st.floats(-2, 2), coord, coord)
def test_contains_implies_causal_set(c1, c2, r, t, x1, x2):
    o, p = cone((c1, c2), r), Point(t, (x1, x2))
    if contains(o, p):
        assert in_causal_set(o, p)


@given(coord, coord, coord, radius, st.floats(-7, 7))
def test_rotate_ball_roundtrip(x, y, z, r, theta):
    b = Ball((x, y, z), r)
    back = rotate_ball(rotate_ball(b, theta), -theta)
    assert np.allclose(back.center, b.center, atol=1e-12, rtol=0)


@pytest.mark.parametrize("d", [2, 3])
def test_small_diamonds_inside_inner_diamond(d):
    g = ScenarioGeometry(0.8, 1.2, 0.2, 0.5, d=d)
    n = 10 if d == 3 else 32
    # probe grid over the bounding box of each small diamond
    for o in (g.o_minus, g.o_plus):
        axes = [np.linspace(c - o.radius, c + o.radius, n) for c in o.center]
        ts = np.linspace(-o.radius, o.radius, n)
        for t in ts:
            for x in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d):
                p = Point(t, x)
                if contains(o, p):
                    assert contains(g.inner, p)


def test_geometry_violations():
    assert ScenarioGeometry(0.8, 1.2, 0.2, 0.5).violations() == []
    bad = ScenarioGeometry(0.6, 1.2, 0.2, 0.5)
    assert any("s + lambda < r1" in v for v in bad.violations())
    assert ScenarioGeometry(0.8, 0.7, 0.2, 0.5).violations()
    assert ScenarioGeometry(0.8, 1.2, 0.3, 0.25).violations()
    with pytest.raises(GeometryViolation):
        bad.require_valid()


def test_ball_validation():
    with pytest.raises(ValueError):
        Ball((0, 0), 0.0)
    with pytest.raises(DimensionMismatch):
        Ball((0, 0, 0, 0), 1.0)
