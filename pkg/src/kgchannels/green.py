"""Causal Green operator of the Klein-Gordon operator on a periodic box.

The primary route is spectral: the spatial discrete Fourier transform of a
source at each Gauss-Legendre time node is propagated with the exact
continuum dispersion ``omega_p = sqrt(|p|^2 + m^2)``.  A second-order leapfrog
integrator with a finite-difference Laplacian is kept as an independent
oracle.

Sign convention: ``(G f)(t) = int dt' sin(omega (t' - t)) / omega  f(t')`` in
momentum space, i.e. advanced minus retarded for ``(box + m^2) G^{+-} = 1``.
With this sign ``F_f(phi) = sigma(G f, phi)`` holds for the symplectic form
``sigma(a, b) = int (u_a v_b - v_a u_b)`` and ``[Phi(f), Phi(h)] = i G(f, h)``
for the vacuum two-point function with positive-frequency factor
``exp(+i omega t)``.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from functools import cached_property, lru_cache, singledispatch
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .errors import (
    CausalMarginExceeded,
    CFLViolation,
    GridMismatch,
    MassNonPositive,
)
from .fields import LatticeField, SpatialGrid, TestFunction, check_fits
from .geometry import Ball

THREADS_ENV = "KGCHANNELS_THREADS"
SUPPORT_THRESHOLD = 1e-8


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def rfft(a: np.ndarray) -> np.ndarray:
    return sfft.rfftn(a, workers=_workers())


def irfft(A: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    return sfft.irfftn(A, s=grid.shape, workers=_workers())


@dataclass(frozen=True)
class KGParams:
    """Mass, lattice and number of Gauss-Legendre time nodes per source."""

    mass: float
    grid: SpatialGrid
    nodes: int = 64

    def __post_init__(self):
        if not self.mass > 0:
            raise MassNonPositive(f"mass must be strictly positive, got {self.mass}")
        if self.nodes < 2:
            raise ValueError("need at least two time nodes")

    @cached_property
    def k2(self) -> np.ndarray:
        """``|p|^2`` on the half-spectrum layout of ``rfftn``."""
        g = self.grid
        full = 2 * np.pi * np.fft.fftfreq(g.N, d=g.h)
        half = 2 * np.pi * np.fft.rfftfreq(g.N, d=g.h)
        axes = [full] * (g.d - 1) + [half]
        return sum(ax**2 for ax in np.ix_(*axes))

    @cached_property
    def omega(self) -> np.ndarray:
        return np.sqrt(self.k2 + self.mass**2)

    @cached_property
    def hermitian_weight(self) -> np.ndarray:
        """Multiplicity of each stored mode when summing over the full spectrum."""
        N = self.grid.N
        w = np.full(N // 2 + 1, 2.0)
        w[0] = w[-1] = 1.0
        return np.broadcast_to(w, self.k2.shape)

    @property
    def parseval(self) -> float:
        """``h^d / N^d``: converts spectral sums to spatial integrals."""
        return self.grid.cell_volume / self.grid.N**self.grid.d

    def spectral_sum(self, X: np.ndarray) -> float:
        """``sum_k X(k)`` over the full spectrum for a mode-symmetric real part."""
        return float(np.sum(self.hermitian_weight * X.real))


# --------------------------------------------------------------------------- sources


@dataclass(frozen=True)
class KGImage:
    """The source ``(box + m^2) w``; it lies in the kernel of the Green operator.

    The second time derivative of the mollifier is sharply peaked near the
    edges of its support, hence the separate, larger node count.
    """

    w: TestFunction
    nodes: int = 256


@dataclass(frozen=True)
class SourceSum:
    terms: tuple[tuple[float, object], ...]

    @classmethod
    def of(cls, *pairs) -> "SourceSum":
        return cls(tuple((float(c), s) for c, s in pairs))


def source_slices(src, params: KGParams) -> list[tuple[float, float, np.ndarray]]:
    """Time slices ``(t_i, weight_i, spatial field)`` such that
    ``int f g d^{1+d}x ~= sum_i weight_i * sum_x field * g(t_i) * h^d``."""
    return _slices(src, params)


@singledispatch
def _slices(src, params):
    raise TypeError(f"unsupported source type {type(src).__name__}")


@_slices.register
def _(src: TestFunction, params: KGParams):
    check_fits(src, params.grid)
    chi = _space_sample(src, params.grid)
    quad = src.quadrature(params.nodes)
    tf = src.time_factor(quad.nodes)
    return [(t, w * src.amplitude * a, chi) for t, w, a in zip(quad.nodes, quad.weights, tf)]


@_slices.register
def _(src: KGImage, params: KGParams):
    w = src.w
    check_fits(w, params.grid)
    chi = _space_sample(w, params.grid)
    kchi = irfft(params.omega**2 * rfft(chi), params.grid)
    quad = w.quadrature(max(params.nodes, src.nodes))
    t2 = w.time_factor(quad.nodes, order=2)
    t0 = w.time_factor(quad.nodes)
    out = [(t, wt * w.amplitude * a, chi) for t, wt, a in zip(quad.nodes, quad.weights, t2)]
    out += [(t, wt * w.amplitude * a, kchi) for t, wt, a in zip(quad.nodes, quad.weights, t0)]
    return out


@_slices.register
def _(src: SourceSum, params: KGParams):
    out = []
    for c, s in src.terms:
        out += [(t, c * w, arr) for t, w, arr in _slices(s, params)]
    return out


@lru_cache(maxsize=32)
def _space_sample(f: TestFunction, grid: SpatialGrid) -> np.ndarray:
    arr = f.space_factor_on(grid)
    arr.setflags(write=False)
    return arr


def source_moments(src, params: KGParams) -> tuple[np.ndarray, np.ndarray]:
    """``(sum_i w_i cos(omega t_i) F_i(k), sum_i w_i sin(omega t_i) F_i(k))``."""
    if isinstance(src, TestFunction):
        return _test_function_moments(src, params)
    spectra: dict[int, np.ndarray] = {}
    Mc = np.zeros(params.k2.shape, dtype=complex)
    Ms = np.zeros_like(Mc)
    for t, w, arr in _slices(src, params):
        if w == 0.0:
            continue
        F = spectra.get(id(arr))
        if F is None:
            F = spectra[id(arr)] = rfft(arr)
        Mc += w * np.cos(params.omega * t) * F
        Ms += w * np.sin(params.omega * t) * F
    return Mc, Ms


@lru_cache(maxsize=32)
def _test_function_moments(f: TestFunction, params: KGParams):
    check_fits(f, params.grid)
    F = rfft(_space_sample(f, params.grid))
    quad = f.quadrature(params.nodes)
    weights = quad.weights * f.amplitude * f.time_factor(quad.nodes)
    C = np.zeros(params.k2.shape)
    S = np.zeros(params.k2.shape)
    for t, w in zip(quad.nodes, weights):
        if w == 0.0:
            continue
        C += w * np.cos(params.omega * t)
        S += w * np.sin(params.omega * t)
    Mc, Ms = C * F, S * F
    Mc.setflags(write=False)
    Ms.setflags(write=False)
    return Mc, Ms


# ------------------------------------------------------------------- Cauchy data


@dataclass(eq=False)
class CauchyData:
    """Field value ``u`` and time derivative ``v`` on the ``t = 0`` lattice."""

    grid: SpatialGrid
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if self.u.shape != self.grid.shape or self.v.shape != self.grid.shape:
            raise GridMismatch("Cauchy data arrays do not match the grid shape")

    @classmethod
    def zeros(cls, grid: SpatialGrid) -> "CauchyData":
        return cls(grid, grid.zeros(), grid.zeros())

    def _same_grid(self, other: "CauchyData"):
        if other.grid != self.grid:
            raise GridMismatch("Cauchy data live on different grids")

    def __add__(self, other: "CauchyData") -> "CauchyData":
        self._same_grid(other)
        return CauchyData(self.grid, self.u + other.u, self.v + other.v)

    def __sub__(self, other: "CauchyData") -> "CauchyData":
        self._same_grid(other)
        return CauchyData(self.grid, self.u - other.u, self.v - other.v)

    def __mul__(self, alpha: float) -> "CauchyData":
        return CauchyData(self.grid, alpha * self.u, alpha * self.v)

    __rmul__ = __mul__

    def norm(self) -> float:
        """Plain lattice L2 norm of the pair ``(u, v)``."""
        return math.sqrt(float(np.sum(self.u**2 + self.v**2)) * self.grid.cell_volume)

    def support_extent(self, rel: float = SUPPORT_THRESHOLD) -> float:
        """Per-axis extent ``max_i |x_i|`` of nodes above ``rel * max``."""
        mag = np.maximum(np.abs(self.u), np.abs(self.v))
        peak = mag.max()
        if peak == 0:
            return 0.0
        pts = self.grid.points[mag > rel * peak]
        return float(np.max(np.abs(pts)))


class Solution:
    """Homogeneous Klein-Gordon solution determined by Cauchy data at ``t = 0``.

    ``support`` is an optional tuple of balls covering the support of the
    data.  Solutions built from sources carry the exact geometric cover;
    otherwise the margin check falls back to a threshold scan of the data.
    """

    def __init__(self, data: CauchyData, params: KGParams, support: tuple[Ball, ...] | None = None):
        if data.grid != params.grid:
            raise GridMismatch("Cauchy data and parameters use different grids")
        self.data = data
        self.params = params
        self.support = None if support is None else tuple(support)

    @cached_property
    def spectra(self) -> tuple[np.ndarray, np.ndarray]:
        return rfft(self.data.u), rfft(self.data.v)

    @cached_property
    def extent(self) -> float:
        if self.support is None:
            return self.data.support_extent()
        return max((max(abs(c) for c in b.center) + b.radius for b in self.support), default=0.0)

    def check_margin(self, t: float) -> None:
        g = self.params.grid
        if self.extent + abs(t) > g.L - 2 * g.h:
            raise CausalMarginExceeded(
                f"data extent {self.extent:.4g} plus |t|={abs(t):.4g} exceeds L - 2h = {g.L - 2 * g.h:.4g}"
            )

    def spectrum_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        U, V = self.spectra
        w = self.params.omega
        c, s = np.cos(w * t), np.sin(w * t)
        return U * c + V * s / w, -U * w * s + V * c

    def at(self, t: float) -> np.ndarray:
        self.check_margin(t)
        U, _ = self.spectrum_at(t)
        return irfft(U, self.params.grid)

    def data_at(self, t: float) -> CauchyData:
        self.check_margin(t)
        U, V = self.spectrum_at(t)
        g = self.params.grid
        return CauchyData(g, irfft(U, g), irfft(V, g))


def source_support(src) -> tuple[Ball, ...]:
    """Balls covering ``J(supp src)`` at ``t = 0``."""
    if isinstance(src, TestFunction):
        return (Ball(src.center, src.radius + src.max_abs_time),)
    if isinstance(src, KGImage):
        return source_support(src.w)
    if isinstance(src, SourceSum):
        return tuple(b for c, s in src.terms if c != 0 for b in source_support(s))
    raise TypeError(f"unsupported source type {type(src).__name__}")


def source_max_time(src) -> float:
    if isinstance(src, TestFunction):
        return src.max_abs_time
    if isinstance(src, KGImage):
        return src.w.max_abs_time
    if isinstance(src, SourceSum):
        return max((source_max_time(s) for c, s in src.terms if c != 0), default=0.0)
    raise TypeError(f"unsupported source type {type(src).__name__}")


def green_cauchy_data(f, params: KGParams) -> CauchyData:
    """Cauchy data at ``t = 0`` of ``G f`` for a test function or other source."""
    Mc, Ms = source_moments(f, params)
    g = params.grid
    return CauchyData(g, irfft(Ms / params.omega, g), irfft(-Mc, g))


@lru_cache(maxsize=32)
def _green_solution(f: TestFunction, params: KGParams) -> Solution:
    return Solution(green_cauchy_data(f, params), params, source_support(f))


def green_solution(f, params: KGParams) -> Solution:
    if isinstance(f, TestFunction):
        return _green_solution(f, params)
    return Solution(green_cauchy_data(f, params), params, source_support(f))


def evolve(sol: Solution, t: float) -> LatticeField:
    return LatticeField(sol.params.grid, sol.at(t))


def pair_against_solution(f, sol: Solution) -> float:
    """Spacetime quadrature ``int f(x) phi(x) d^{1+d}x`` with ``phi`` evolved to the nodes of ``f``."""
    params = sol.params
    total = 0.0
    for t, w, arr in source_slices(f, params):
        if w == 0.0:
            continue
        total += w * float(np.sum(arr * sol.at(t)))
    return total * params.grid.cell_volume


def pairing_G(f, h, params: KGParams) -> float:
    """``G(f, h) = int f(x) (G h)(x) d^{1+d}x``."""
    return pair_against_solution(f, green_solution(h, params))


# --------------------------------------------------------------- leapfrog oracle


def fd_laplacian(u: np.ndarray, h: float) -> np.ndarray:
    """Periodic second-order ``2d+1`` point Laplacian."""
    out = -2.0 * u.ndim * u
    for ax in range(u.ndim):
        out = out + np.roll(u, 1, axis=ax) + np.roll(u, -1, axis=ax)
    return out / h**2


def spectral_laplacian(u: np.ndarray, params: KGParams) -> np.ndarray:
    return irfft(-params.k2 * rfft(u), params.grid)


def leapfrog_evolve(data: CauchyData, t: float, steps: int, params: KGParams) -> CauchyData:
    """Velocity-Verlet (staggered leapfrog) with the finite-difference Laplacian."""
    if data.grid != params.grid:
        raise GridMismatch("Cauchy data and parameters use different grids")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    g = params.grid
    dt = t / steps
    if abs(dt) > g.h / math.sqrt(g.d):
        raise CFLViolation(f"|dt|={abs(dt):.4g} exceeds h/sqrt(d)={g.h / math.sqrt(g.d):.4g}")
    m2 = params.mass**2

    def accel(u):
        return fd_laplacian(u, g.h) - m2 * u

    u = data.u.copy()
    v = data.v.copy()
    a = accel(u)
    for _ in range(steps):
        v += 0.5 * dt * a
        u += dt * v
        a = accel(u)
        v += 0.5 * dt * a
    return CauchyData(g, u, v)


def discrete_energy(data: CauchyData, params: KGParams, dt: float = 0.0) -> float:
    """``1/2 int (v^2 + |grad u|^2 + m^2 u^2)`` with forward differences.

    With ``dt`` set, subtracts ``dt^2/8 int (A u)^2`` (``A = -Delta_h + m^2``):
    the combination is conserved exactly by :func:`leapfrog_evolve`.
    """
    g = params.grid
    u = data.u
    grad2 = sum((np.roll(u, -1, axis=ax) - u) ** 2 for ax in range(g.d)) / g.h**2
    e = 0.5 * float(np.sum(data.v**2 + grad2 + params.mass**2 * u**2))
    if dt:
        Au = -fd_laplacian(u, g.h) + params.mass**2 * u
        e -= dt**2 / 8.0 * float(np.sum(Au**2))
    return e * g.cell_volume


def kg_residual(sol: Solution, t: float, dt: float) -> np.ndarray:
    """``(box + m^2) phi`` at time ``t``: central second difference in time, spectral in space."""
    p = sol.params
    prev, mid, nxt = sol.at(t - dt), sol.at(t), sol.at(t + dt)
    dtt = (nxt - 2 * mid + prev) / dt**2
    return dtt - spectral_laplacian(mid, p) + p.mass**2 * mid


# ------------------------------------------------------------------------ dumps

_MAGIC = b"KGCD0001"


def write_cauchy_csv(path, data: CauchyData, mass: float) -> None:
    g = data.grid
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# kgchannels cauchy data v1\n")
        fh.write("d,N,L,m\n")
        fh.write(f"{g.d},{g.N},{float(g.L)!r},{float(mass)!r}\n")
        fh.write("u,v\n")
        np.savetxt(fh, np.column_stack([data.u.ravel(), data.v.ravel()]), fmt="%.17g", delimiter=",")


def read_cauchy_csv(path) -> tuple[CauchyData, float]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines[0].startswith("# kgchannels cauchy data"):
        raise ValueError("not a Cauchy-data CSV dump")
    d, N, L, m = lines[2].split(",")
    grid = SpatialGrid(int(d), int(N), float(L))
    vals = np.loadtxt(lines[4:], delimiter=",", ndmin=2)
    u = vals[:, 0].reshape(grid.shape)
    v = vals[:, 1].reshape(grid.shape)
    return CauchyData(grid, u, v), float(m)


def write_cauchy_binary(path, data: CauchyData, mass: float) -> None:
    g = data.grid
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<4d", g.d, g.N, g.L, mass))
        fh.write(np.ascontiguousarray(data.u, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(data.v, dtype="<f8").tobytes())


def read_cauchy_binary(path) -> tuple[CauchyData, float]:
    raw = Path(path).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError("not a Cauchy-data binary dump")
    d, N, L, m = struct.unpack("<4d", raw[8:40])
    grid = SpatialGrid(int(d), int(N), L)
    n = grid.N**grid.d
    vals = np.frombuffer(raw[40:], dtype="<f8")
    if vals.size != 2 * n:
        raise ValueError("truncated Cauchy-data dump")
    return CauchyData(grid, vals[:n].reshape(grid.shape).copy(), vals[n:].reshape(grid.shape).copy()), m
