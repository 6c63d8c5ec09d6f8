"""Smooth compactly supported test functions, the periodic lattice and quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, SupportOverflow
from .geometry import Ball, DoubleCone, Point, rotation_matrix


def _q(y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    pos = y > 0
    out[pos] = np.exp(-1.0 / y[pos])
    return out


def _q_derivatives(y: np.ndarray):
    """Return q, q', q'' for q(y) = exp(-1/y) (y > 0), 0 otherwise."""
    q = _q(y)
    d1 = np.zeros_like(y)
    d2 = np.zeros_like(y)
    pos = q > 0  # q underflows long before 1/y^4 overflows
    yp = y[pos]
    d1[pos] = q[pos] / yp**2
    d2[pos] = q[pos] * (1.0 / yp**4 - 2.0 / yp**3)
    return q, d1, d2


def smooth_step(x, order: int = 0) -> np.ndarray:
    """``S(x) = q(x) / (q(x) + q(1 - x))`` and its first two derivatives.

    ``S`` is exactly 0 for ``x <= 0`` and exactly 1 for ``x >= 1``.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    if order == 0:
        out[x >= 1] = 1.0
    mid = (x > 0) & (x < 1)
    if np.any(mid):
        xm = x[mid]
        g, g1, g2 = _q_derivatives(xm)
        p, p1, p2 = _q_derivatives(1.0 - xm)
        D = g + p
        if order == 0:
            out[mid] = g / D
        elif order == 1:
            out[mid] = (g1 * p + g * p1) / D**2
        elif order == 2:
            n1 = g1 * p + g * p1
            dn1 = g2 * p - g * p2
            dD = g1 - p1
            out[mid] = dn1 / D**2 - 2.0 * n1 * dD / D**3
        else:
            raise ValueError("only derivatives up to order 2 are available")
    return out[0] if scalar else out


@dataclass(frozen=True)
class BumpProfile:
    """Radial cutoff: 1 on ``[0, a]``, 0 on ``[b, inf)``, smooth and monotone between."""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (self.a >= 0 and self.b > self.a):
            raise ValueError(f"need 0 <= a < b, got a={self.a}, b={self.b}")

    def __call__(self, s) -> np.ndarray:
        return 1.0 - smooth_step((np.asarray(s, dtype=float) - self.a) / (self.b - self.a))

    def derivative(self, s, order: int = 1) -> np.ndarray:
        w = self.b - self.a
        return -smooth_step((np.asarray(s, dtype=float) - self.a) / w, order) / w**order


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic box ``[-L, L)^d`` with ``N`` nodes per axis."""

    d: int
    N: int
    L: float

    def __post_init__(self):
        if self.d not in (2, 3):
            raise DimensionMismatch(f"spatial dimension must be 2 or 3, got {self.d}")
        if self.N < 16 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 16, got {self.N}")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @cached_property
    def open_mesh(self) -> list[np.ndarray]:
        return np.ix_(*([self.axis] * self.d))

    @cached_property
    def points(self) -> np.ndarray:
        """Node coordinates, shape ``(N,)*d + (d,)``."""
        mesh = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        return np.stack(mesh, axis=-1)

    def distance_from(self, center) -> np.ndarray:
        r2 = sum((ax - c) ** 2 for ax, c in zip(self.open_mesh, center))
        return np.sqrt(r2)

    @cached_property
    def radius(self) -> np.ndarray:
        return self.distance_from(np.zeros(self.d))

    def fits(self, center, radius: float, margin: float | None = None) -> bool:
        """Per-axis check that a ball plus ``margin`` (default 2h) avoids the box seam."""
        margin = 2 * self.h if margin is None else margin
        return max(abs(c) for c in center) + radius <= self.L - margin

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)


@dataclass
class LatticeField:
    grid: SpatialGrid
    values: np.ndarray

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.cell_volume)

    def support_radius(self, rel: float = 1e-12) -> float:
        return support_radius(self.values, self.grid, rel)


def support_radius(values: np.ndarray, grid: SpatialGrid, rel: float = 1e-8, center=None) -> float:
    """Largest distance from ``center`` of a node whose value exceeds ``rel * max``."""
    peak = np.max(np.abs(values))
    if peak == 0:
        return 0.0
    r = grid.radius if center is None else grid.distance_from(center)
    return float(np.max(r[np.abs(values) > rel * peak]))


@dataclass(frozen=True, eq=False)
class TimeQuadrature:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)


def gauss_legendre(t0: float, half_width: float, M: int = 64) -> TimeQuadrature:
    x, w = np.polynomial.legendre.leggauss(M)
    return TimeQuadrature(t0 + half_width * x, half_width * w)


@dataclass(frozen=True)
class TestFunction:
    """``f(t, x) = amplitude * eta(|t - t0| / T) * eta(|x - center| / rho)``.

    Support lies in the box ``{|t - t0| <= T} x {|x - center| <= rho}``.
    """

    __test__ = False  # not a pytest class

    center: tuple[float, ...]
    radius: float
    half_width: float
    t0: float = 0.0
    amplitude: float = 1.0
    profile: BumpProfile = field(default_factory=BumpProfile)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) not in (2, 3):
            raise DimensionMismatch("test function center must have 2 or 3 components")
        if not (self.radius > 0 and self.half_width > 0):
            raise ValueError("radius and half_width must be positive")
        if self.profile.b > 1.0:
            raise ValueError("profile.b must be <= 1 so that the declared radius bounds the support")

    @property
    def d(self) -> int:
        return len(self.center)

    @property
    def t_range(self) -> tuple[float, float]:
        return self.t0 - self.half_width, self.t0 + self.half_width

    @property
    def max_abs_time(self) -> float:
        return abs(self.t0) + self.half_width

    def time_factor(self, t, order: int = 0) -> np.ndarray:
        tau = np.abs(np.asarray(t, dtype=float) - self.t0) / self.half_width
        if order == 0:
            return self.profile(tau)
        if order == 2:
            return self.profile.derivative(tau, 2) / self.half_width**2
        raise ValueError("time derivatives of order 0 or 2 only")

    def space_factor(self, points: np.ndarray) -> np.ndarray:
        """Spatial profile at points of shape ``(..., d)``."""
        r = np.linalg.norm(np.asarray(points, dtype=float) - np.asarray(self.center), axis=-1)
        return self.profile(r / self.radius)

    def space_factor_on(self, grid: SpatialGrid) -> np.ndarray:
        return self.profile(grid.distance_from(self.center) / self.radius)

    def __call__(self, t, points) -> np.ndarray:
        return self.amplitude * self.time_factor(t) * self.space_factor(points)

    def quadrature(self, M: int = 64) -> TimeQuadrature:
        return gauss_legendre(self.t0, self.half_width, M)

    def enclosing_cone(self) -> DoubleCone:
        """Smallest double cone over a ball at t=0 containing the support box."""
        return DoubleCone(Ball(self.center, self.radius + self.max_abs_time))

    def support_corners(self) -> list[Point]:
        """Extreme points of the support box (used for containment probes)."""
        pts = []
        for t in self.t_range:
            for i in range(self.d):
                for sgn in (-1.0, 1.0):
                    x = np.array(self.center)
                    x[i] += sgn * self.radius
                    pts.append(Point(t, x))
        return pts

    def inside(self, region: DoubleCone) -> bool:
        """Whether the closed support box lies inside the open double cone."""
        return math.dist(self.center, region.center) + self.radius + self.max_abs_time < region.radius

    def rotated(self, theta: float, axis: int = 2, about=None) -> "TestFunction":
        """``(R f)(t, x) = f(t, R^{-1} x)``: the same bump with its center rotated."""
        R = rotation_matrix(self.d, theta, axis)
        o = np.zeros(self.d) if about is None else np.asarray(about, dtype=float)
        return replace(self, center=tuple(R @ (np.asarray(self.center) - o) + o))

    def scaled(self, alpha: float) -> "TestFunction":
        return replace(self, amplitude=self.amplitude * alpha)

    def to_dict(self) -> dict:
        return {
            "center": list(self.center),
            "radius": self.radius,
            "half_width": self.half_width,
            "t0": self.t0,
            "amplitude": self.amplitude,
            "profile": {"a": self.profile.a, "b": self.profile.b},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TestFunction":
        data = dict(data)
        prof = data.pop("profile", None)
        if prof is not None:
            data["profile"] = BumpProfile(**prof)
        return cls(**data)


def evaluate(f: TestFunction, p: Point) -> float:
    if p.d != f.d:
        raise DimensionMismatch(f"point has d={p.d}, test function d={f.d}")
    return float(f(p.t, np.asarray(p.x)))


def check_fits(f: TestFunction, grid: SpatialGrid) -> None:
    if f.d != grid.d:
        raise DimensionMismatch(f"test function d={f.d}, grid d={grid.d}")
    if not grid.fits(f.center, f.radius):
        raise SupportOverflow(
            f"support of radius {f.radius} at {f.center} does not fit inside [-{grid.L}, {grid.L}) "
            f"with a margin of two grid spacings"
        )


def sample(f: TestFunction, grid: SpatialGrid, t: float) -> LatticeField:
    check_fits(f, grid)
    tf = float(f.time_factor(t))
    if tf == 0.0:
        return LatticeField(grid, grid.zeros())
    return LatticeField(grid, f.amplitude * tf * f.space_factor_on(grid))


def integrate_spacetime(
    f: TestFunction,
    g: Callable[[float, np.ndarray], np.ndarray],
    grid: SpatialGrid,
    nodes: int = 64,
) -> float:
    """Gauss-Legendre in time times the periodic trapezoidal rule in space.

    ``g(t, points)`` receives node coordinates of shape ``grid.shape + (d,)``.
    """
    check_fits(f, grid)
    chi = f.space_factor_on(grid)
    quad = f.quadrature(nodes)
    total = 0.0
    for t, w in zip(quad.nodes, quad.weights):
        weight = w * f.amplitude * float(f.time_factor(t))
        if weight == 0.0:
            continue
        total += weight * float(np.sum(chi * np.broadcast_to(g(t, grid.points), grid.shape)))
    return total * grid.cell_volume
