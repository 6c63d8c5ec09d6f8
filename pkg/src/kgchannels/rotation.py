"""Localized instantaneous rotation of Cauchy data.

The generating vector field ``eta(r) (x1 d/dx2 - x2 d/dx1)`` is tangent to
spheres, so its flow is the rotation by ``theta * eta(|x|)`` in closed form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import GridMismatch
from .fields import BumpProfile, SpatialGrid
from .geometry import Ball
from .green import CauchyData


@dataclass(frozen=True)
class LocalizedRotation:
    r1: float
    r2: float
    theta: float
    axis: int = 2
    profile: BumpProfile | None = field(default=None, compare=True)

    def __post_init__(self):
        if not 0 < self.r1 < self.r2:
            raise ValueError(f"need 0 < r1 < r2, got r1={self.r1}, r2={self.r2}")
        if self.profile is None:
            object.__setattr__(self, "profile", BumpProfile(self.r1, self.r2))
        elif (self.profile.a, self.profile.b) != (self.r1, self.r2):
            raise ValueError("profile plateau and support must be (r1, r2)")

    def inverse(self) -> "LocalizedRotation":
        return LocalizedRotation(self.r1, self.r2, -self.theta, self.axis, self.profile)

    def plane(self, d: int) -> tuple[int, int]:
        if d == 2:
            return 0, 1
        return (self.axis + 1) % 3, (self.axis + 2) % 3


def eta(rot: LocalizedRotation, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("eta is defined for r >= 0")
    return rot.profile(r)


def _rotate(x: np.ndarray, angle: np.ndarray, i: int, j: int) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    out = np.array(x, dtype=float, copy=True)
    out[..., i] = c * x[..., i] - s * x[..., j]
    out[..., j] = s * x[..., i] + c * x[..., j]
    return out


def gamma(rot: LocalizedRotation, x, theta: float | None = None) -> np.ndarray:
    """Flow of the cutoff rotation field to parameter ``theta`` (default ``rot.theta``)."""
    x = np.asarray(x, dtype=float)
    th = rot.theta if theta is None else theta
    i, j = rot.plane(x.shape[-1])
    return _rotate(x, th * eta(rot, np.linalg.norm(x, axis=-1)), i, j)


def gamma_inverse(rot: LocalizedRotation, x) -> np.ndarray:
    return gamma(rot, x, -rot.theta)


def jacobian_det(rot: LocalizedRotation, x, step: float | None = None) -> np.ndarray:
    """``det D gamma`` by fourth-order central differences.

    The default step is ``1e-4 * min(1, r2)``.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    hstep = 1e-4 * min(1.0, rot.r2) if step is None else step
    J = np.empty(x.shape[:-1] + (d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = hstep
        col = (
            -gamma(rot, x + 2 * e)
            + 8 * gamma(rot, x + e)
            - 8 * gamma(rot, x - e)
            + gamma(rot, x - 2 * e)
        ) / (12 * hstep)
        J[..., :, k] = col
    return np.linalg.det(J)


def catmull_rom_weights(s: np.ndarray) -> np.ndarray:
    """Weights for offsets -1, 0, 1, 2 at fractional position ``s`` in [0, 1)."""
    s2, s3 = s * s, s * s * s
    return np.stack(
        [
            0.5 * (-s3 + 2 * s2 - s),
            0.5 * (3 * s3 - 5 * s2 + 2),
            0.5 * (-3 * s3 + 4 * s2 + s),
            0.5 * (s3 - s2),
        ],
        axis=-1,
    )


@dataclass(frozen=True, eq=False)
class ResamplePlan:
    """Periodic separable cubic interpolation at a fixed set of points."""

    grid: SpatialGrid
    active: np.ndarray  # flat indices of the nodes that are resampled
    index: tuple[np.ndarray, ...]  # per axis, (n_active, 4) integer indices
    weight: tuple[np.ndarray, ...]  # per axis, (n_active, 4) weights
    factor: np.ndarray | None = None  # optional multiplier at the active nodes

    @classmethod
    def at(cls, grid: SpatialGrid, active: np.ndarray, points: np.ndarray, factor=None) -> "ResamplePlan":
        idx, wts = [], []
        for k in range(grid.d):
            pos = (points[:, k] + grid.L) / grid.h
            base = np.floor(pos)
            frac = pos - base
            offs = base.astype(np.int64)[:, None] + np.arange(-1, 3)
            idx.append(np.mod(offs, grid.N))
            wts.append(catmull_rom_weights(frac))
        return cls(grid, active, tuple(idx), tuple(wts), factor)

    def apply(self, values: np.ndarray) -> np.ndarray:
        out = np.array(values, dtype=float, copy=True)
        if self.active.size == 0:
            return out
        acc = np.zeros(self.active.size)
        for combo in itertools.product(range(4), repeat=self.grid.d):
            w = np.ones(self.active.size)
            for k, c in enumerate(combo):
                w = w * self.weight[k][:, c]
            acc += w * values[tuple(self.index[k][:, c] for k, c in enumerate(combo))]
        out.reshape(-1)[self.active] = acc
        return out


@lru_cache(maxsize=4)
def _plans(rot: LocalizedRotation, grid: SpatialGrid) -> tuple[ResamplePlan, ResamplePlan]:
    pts = grid.points.reshape(-1, grid.d)
    r = np.linalg.norm(pts, axis=-1)
    active = np.flatnonzero(eta(rot, r) > 0)
    x = pts[active]
    pulled = gamma_inverse(rot, x)
    q = jacobian_det(rot, pulled)
    plain = ResamplePlan.at(grid, active, pulled)
    scaled = ResamplePlan(grid, active, plain.index, plain.weight, q)
    return plain, scaled


def apply_S(rot: LocalizedRotation, data: CauchyData) -> CauchyData:
    """``(u o gamma^{-1}, q * v o gamma^{-1})``.

    Nodes with ``eta(|x|) = 0`` are copied, not interpolated.
    """
    if rot.theta == 0:
        return CauchyData(data.grid, data.u.copy(), data.v.copy())
    plain, scaled = _plans(rot, data.grid)
    u = plain.apply(data.u)
    v = plain.apply(data.v)
    v.reshape(-1)[scaled.active] *= scaled.factor
    return CauchyData(data.grid, u, v)


@lru_cache(maxsize=4)
def _global_plan(grid: SpatialGrid, theta: float, axis: int) -> ResamplePlan:
    pts = grid.points.reshape(-1, grid.d)
    rot = LocalizedRotation(1.0, 2.0, theta, axis)
    i, j = rot.plane(grid.d)
    pulled = _rotate(pts, np.full(len(pts), -theta), i, j)
    return ResamplePlan.at(grid, np.arange(len(pts)), pulled)


def rotate_lattice(values: np.ndarray, grid: SpatialGrid, theta: float, axis: int = 2) -> np.ndarray:
    """Global rotation ``u o R^{-1}`` by cubic resampling."""
    if values.shape != grid.shape:
        raise GridMismatch("array does not match grid shape")
    return _global_plan(grid, float(theta), axis).apply(values)


def rotate_data(data: CauchyData, theta: float, axis: int = 2) -> CauchyData:
    return CauchyData(
        data.grid,
        rotate_lattice(data.u, data.grid, theta, axis),
        rotate_lattice(data.v, data.grid, theta, axis),
    )


def point_reflection(values: np.ndarray, plane: tuple[int, int]) -> np.ndarray:
    """``u(-x_i, -x_j, ...)`` by index permutation ``k -> (N - k) mod N``."""
    out = values
    for ax in plane:
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def rotate_support(rot: LocalizedRotation, ball: Ball, about=None) -> Ball:
    """A ball covering ``gamma(ball)`` for the flow centred at ``about``."""
    o = np.zeros(ball.d) if about is None else np.asarray(about, dtype=float)
    rel = np.asarray(ball.center) - o
    r = float(np.linalg.norm(rel))
    if r + ball.radius <= rot.r1:
        i, j = rot.plane(ball.d)
        return Ball(_rotate(rel, np.asarray(rot.theta), i, j) + o, ball.radius)
    if r - ball.radius >= rot.r2:
        return ball
    return Ball(o, r + ball.radius)
