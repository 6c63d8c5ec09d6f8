import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import gaussian_expectation

from kgchannels.errors import GeometryViolation
from kgchannels.fields import TestFunction
from kgchannels.fields import SpatialGrid
from kgchannels.geometry import ScenarioGeometry
from kgchannels.green import KGParams, pairing_G
from kgchannels.quantum import (
    VacuumContext,
    WeylWord,
    field_shift,
    field_shift_from_two_point,
    g_n,
    quantum_scenario,
    tn_expectation_defect,
    two_point,
    weyl_vacuum,
)

F = TestFunction((0.05, 0.0), 0.3, 0.1, -0.05)
H = TestFunction((-0.05, 0.1), 0.35, 0.1, 0.08)
GEO = ScenarioGeometry(0.8, 1.2, 0.2, 0.5)
C = TestFunction((0.5, 0.0), 0.09, 0.09, 0.01, 1000.0)
A = TestFunction((-0.5, 0.0), 0.09, 0.09, -0.01, 1000.0)


@pytest.fixture(scope="module")
def ctx(params128):
    return VacuumContext(params128)


def unit(f, ctx):
    return f.scaled(1.0 / math.sqrt(ctx.two_point(f, f).real))


def test_two_point_diagonal_real_positive(params128):
    w = two_point(F, F, params128)
    assert w.real > 0 and abs(w.imag) <= 1e-12 * w.real


def test_two_point_hermitian(params128):
    assert abs(two_point(F, H, params128) - two_point(H, F, params128).conjugate()) <= 1e-12 * abs(two_point(F, H, params128))


def test_convention_lock(params128):
    s = abs(pairing_G(F, H, params128))
    assert s > 0
    assert abs(field_shift_from_two_point(F, H, params128) - field_shift(F, H, params128)) <= 1e-5 * s


def test_cauchy_schwarz(params128):
    w = two_point(F, H, params128)
    assert abs(w) ** 2 <= two_point(F, F, params128).real * two_point(H, H, params128).real


@given(st.integers(1, 3))
def test_vacuum_invariant_under_lattice_rotations(k):
    p = KGParams(1.0, SpatialGrid(2, 128, 1.6))
    w = two_point(F, F, p).real
    rf = F.rotated(k * math.pi / 2)
    assert abs(two_point(rf, rf, p).real - w) <= 1e-12 * w


def test_vacuum_rotation_defect_shrinks_with_refinement():
    defects = []
    for n in (64, 128, 256):
        p = KGParams(1.0, SpatialGrid(2, n, 1.6))
        w = two_point(F, F, p).real
        defects.append(abs(two_point(F.rotated(1.0), F.rotated(1.0), p).real - w) / w)
    assert defects[0] > defects[1] > defects[2]
    assert defects[2] <= 1e-6


def test_empty_word_and_unitarity(ctx):
    assert weyl_vacuum(WeylWord(), ctx) == 1.0
    val = weyl_vacuum(WeylWord(((H, 1.0), (H, -1.0))), ctx)
    assert abs(val - 1.0) <= 1e-12


def test_single_weyl_is_gaussian(ctx):
    w = ctx.two_point(F, F).real
    assert math.isclose(weyl_vacuum(WeylWord(((F, 1.0),)), ctx).real, math.exp(-0.5 * w), rel_tol=1e-12)


def test_exchange_phase(ctx):
    f, h = unit(F, ctx), unit(H, ctx)
    g = ctx.G(f, h)
    assert abs(g) > 1e-3
    ratio = weyl_vacuum(WeylWord(((f, 1.0), (h, 1.0))), ctx) / weyl_vacuum(WeylWord(((h, 1.0), (f, 1.0))), ctx)
    assert abs(ratio - cmath.exp(-1j * g)) <= 1e-10


def test_field_expectations(ctx):
    assert abs(weyl_vacuum(WeylWord(field=F), ctx)) <= 1e-15
    shifted = weyl_vacuum(WeylWord.conjugation(H, WeylWord(field=F)), ctx)
    g = field_shift(F, H, ctx.params)
    assert abs(shifted - g) <= 1e-10 * abs(g)


def test_tn_zero_shift(ctx):
    far = TestFunction((1.2, 1.2), 0.1, 0.05)
    assert abs(ctx.G(F, far)) <= 1e-12
    assert abs(tn_expectation_defect(10, F, far, ctx)) <= 1e-12


def test_tn_matches_quadrature_oracle(ctx):
    var = ctx.two_point(F, F).real
    a = ctx.G(F, H)
    for n in (1, 5, 50):
        g = g_n(n)
        ref = gaussian_expectation(g, var) - gaussian_expectation(g, var, a)
        assert abs(tn_expectation_defect(n, F, H, ctx) - ref) <= 1e-10 * max(abs(ref), 1e-12)


def test_tn_approaches_minus_shift(ctx):
    f = unit(F, ctx).scaled(0.5)
    h = H.scaled(2.0)
    a = ctx.G(f, h)
    errs = [abs(tn_expectation_defect(n, f, h, ctx) + a) for n in (1, 10, 100, 1000)]
    assert all(b < e for e, b in zip(errs, errs[1:]))
    assert errs[-1] <= 0.1 * abs(a)
    assert abs(tn_expectation_defect(1000, f, h, ctx)) > 0


def test_tn_rejects_bad_n(ctx):
    with pytest.raises(ValueError):
        tn_expectation_defect(0, F, H, ctx)


def test_scenario_no_signal_and_signal(ctx):
    rec = quantum_scenario(C, A, math.pi, GEO, ctx)
    assert abs(rec["baseline"]) <= 1e-15
    assert abs(rec["alice_only"] - rec["baseline"]) <= 1e-8 * abs(rec["G_Rc_h"])
    assert abs(rec["alice_and_bob"] - rec["G_Rc_h"]) <= 1e-10 * abs(rec["G_Rc_h"])
    assert abs(rec["G_Rc_h"]) > 0


def test_scenario_theta_zero(ctx):
    rec = quantum_scenario(C, A, 0.0, GEO, ctx)
    assert rec["alice_and_bob"] == rec["alice_only"]


def test_scenario_geometry_violation(ctx):
    with pytest.raises(GeometryViolation):
        quantum_scenario(C, TestFunction((0.0, 0.0), 0.09, 0.09), math.pi, GEO, ctx)
