"""Regions of Minkowski space used by the scenario.

Only double cones over balls in the ``t = 0`` hyperplane are modelled.  All
regions are open, so every containment test uses strict inequalities.
Units have ``c = 1`` and spatial dimension ``d`` is 2 or 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GeometryViolation


def _as_vector(x) -> tuple[float, ...]:
    return tuple(float(c) for c in np.ravel(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class Point:
    t: float
    x: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", _as_vector(self.x))
        if self.d not in (2, 3):
            raise DimensionMismatch(f"spatial dimension must be 2 or 3, got {self.d}")

    @property
    def d(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class Ball:
    """Open ball in the ``t = 0`` hyperplane."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_vector(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        if self.d not in (2, 3):
            raise DimensionMismatch(f"spatial dimension must be 2 or 3, got {self.d}")

    @property
    def d(self) -> int:
        return len(self.center)

    def translated(self, shift) -> "Ball":
        return Ball(np.add(self.center, shift), self.radius)


@dataclass(frozen=True)
class DoubleCone:
    """Domain of dependence ``D(base)`` of a ball at ``t = 0``."""

    base: Ball

    @property
    def center(self) -> tuple[float, ...]:
        return self.base.center

    @property
    def radius(self) -> float:
        return self.base.radius

    @property
    def d(self) -> int:
        return self.base.d


def _check_dims(a, b):
    if a.d != b.d:
        raise DimensionMismatch(f"dimension mismatch: {a.d} vs {b.d}")


def contains(region: DoubleCone, p: Point) -> bool:
    """True iff ``|x - center| + |t| < radius``."""
    _check_dims(region, p)
    dist = math.dist(p.x, region.center)
    return dist + abs(p.t) < region.radius


def are_spacelike(a: DoubleCone, b: DoubleCone) -> bool:
    """Double cones over disjoint balls at ``t = 0`` are causally disjoint."""
    _check_dims(a, b)
    return math.dist(a.center, b.center) >= a.radius + b.radius


def in_causal_set(o: DoubleCone, p: Point) -> bool:
    """True iff ``p`` lies in ``J(o)``, i.e. ``|x - center| - |t| < radius``."""
    _check_dims(o, p)
    return math.dist(p.x, o.center) - abs(p.t) < o.radius


def rotation_matrix(d: int, theta: float, axis: int = 2) -> np.ndarray:
    """Rotation by ``theta`` about the coordinate axis ``axis`` (ignored for d=2).

    For d=3 the rotation acts in the plane of the two remaining axes taken in
    cyclic order, so ``axis=2`` is the usual rotation of the (x1, x2) plane.
    """
    c, s = math.cos(theta), math.sin(theta)
    if d == 2:
        return np.array([[c, -s], [s, c]])
    if d != 3:
        raise DimensionMismatch(f"spatial dimension must be 2 or 3, got {d}")
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    i, j = (axis + 1) % 3, (axis + 2) % 3
    R = np.eye(3)
    R[i, i], R[i, j], R[j, i], R[j, j] = c, -s, s, c
    return R


def rotate_ball(b: Ball, theta: float, axis: int = 2) -> Ball:
    R = rotation_matrix(b.d, theta, axis)
    return Ball(R @ np.asarray(b.center), b.radius)


def unit_vector(d: int, i: int) -> np.ndarray:
    e = np.zeros(d)
    e[i] = 1.0
    return e


@dataclass(frozen=True)
class ScenarioGeometry:
    """Radii of the nested diamonds and the two small diamonds ``O(+)``/``O(-)``.

    ``O(r1) ⊂ O(r2) = O_Bob``; ``O(-) = D(B(s) - lam e1)`` belongs to Alice and
    ``O(+) = D(B(s) + lam e1)`` to Charlie.
    """

    r1: float
    r2: float
    s: float
    lam: float
    d: int = 2
    axis: int = 2

    def violations(self) -> list[str]:
        out = []
        if min(self.r1, self.r2, self.s, self.lam) <= 0:
            out.append("all of r1, r2, s, lambda must be positive")
        if not self.r1 < self.r2:
            out.append("nesting r1 < r2")
        if not self.s + self.lam < self.r1:
            out.append("constraint s + lambda < r1")
        if not self.lam > self.s:
            out.append("separation lambda > s (O(+) and O(-) spacelike)")
        if self.d not in (2, 3):
            out.append("dimension must be 2 or 3")
        return out

    def require_valid(self) -> "ScenarioGeometry":
        problems = self.violations()
        if problems:
            raise GeometryViolation("; ".join(problems))
        return self

    def _ball(self, sign: float) -> Ball:
        return Ball(sign * self.lam * unit_vector(self.d, 0), self.s)

    @property
    def inner(self) -> DoubleCone:
        return DoubleCone(Ball(np.zeros(self.d), self.r1))

    @property
    def bob(self) -> DoubleCone:
        return DoubleCone(Ball(np.zeros(self.d), self.r2))

    @property
    def o_minus(self) -> DoubleCone:
        return DoubleCone(self._ball(-1.0))

    @property
    def o_plus(self) -> DoubleCone:
        return DoubleCone(self._ball(+1.0))
