"""Polynomial functionals on the solution space, the Peierls bracket and channels.

A channel acts on functionals by pull-back, ``(Y P)(phi) = P(S^{-1} phi)``,
and on Dirac states by ``delta_phi o Y = delta_{S^{-1} phi}``.  The state side
has no localization restriction and is what the scenario runs use; the
functional side is exact only for generators where the flow is a rigid
rotation or the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import GridMismatch, UnsupportedLocalization
from .fields import TestFunction
from .geometry import Ball, DoubleCone, Point, are_spacelike, in_causal_set
from .green import CauchyData, KGParams, Solution, green_solution
from .rotation import LocalizedRotation, apply_S, rotate_support
from .symplectic import kappa, linear_functional, sigma

Monomial = tuple  # sorted tuple of generators


def _key(f) -> str:
    return repr(f)


def _canon(factors: Iterable) -> Monomial:
    return tuple(sorted(factors, key=_key))


class PolynomialFunctional:
    """Finite sum ``sum_k c_k F_{f_k1} ... F_{f_kn}``; the empty monomial is the unit."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, complex] | None = None):
        acc: dict[Monomial, complex] = {}
        for mono, c in (terms or {}).items():
            key = _canon(mono)
            acc[key] = acc.get(key, 0) + c
        self.terms = {m: c for m, c in acc.items() if c != 0}

    @classmethod
    def unit(cls, c: complex = 1.0) -> "PolynomialFunctional":
        return cls({(): c})

    @classmethod
    def linear(cls, f, c: complex = 1.0) -> "PolynomialFunctional":
        return cls({(f,): c})

    @classmethod
    def product(cls, *fs, c: complex = 1.0) -> "PolynomialFunctional":
        return cls({tuple(fs): c})

    def __add__(self, other):
        other = _lift(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return PolynomialFunctional(t)

    __radd__ = __add__

    def __neg__(self):
        return PolynomialFunctional({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        t: dict[Monomial, complex] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = _canon(m1 + m2)
                t[key] = t.get(key, 0) + c1 * c2
        return PolynomialFunctional(t)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolynomialFunctional):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self):
        return f"PolynomialFunctional({len(self.terms)} terms, degree {self.degree})"

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(len(m) == 0 for m in self.terms)

    def constant(self) -> complex:
        return self.terms.get((), 0)

    def generators(self) -> set:
        return {f for m in self.terms for f in m}

    def conj(self) -> "PolynomialFunctional":
        return PolynomialFunctional({m: np.conj(c) for m, c in self.terms.items()})

    def close_to(self, other: "PolynomialFunctional", tol: float) -> bool:
        diff = self - other
        return all(abs(c) <= tol for c in diff.terms.values())

    def to_spec(self, ids: Mapping) -> list:
        """``[(coefficient, [id, ...]), ...]`` using ``ids`` to name generators."""
        return [[c, [ids[f] for f in m]] for m, c in self.terms.items()]

    @classmethod
    def from_spec(cls, spec: list, registry: Mapping) -> "PolynomialFunctional":
        return cls({tuple(registry[i] for i in ids): c for c, ids in spec})


def _lift(x) -> PolynomialFunctional:
    if isinstance(x, PolynomialFunctional):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return PolynomialFunctional.unit(x)
    raise TypeError(f"cannot combine a functional with {type(x).__name__}")


class BracketContext:
    """Evaluates ``kappa`` with a cache keyed on the canonically ordered pair.

    Storing only one orientation makes antisymmetry and ``{F_f, F_f} = 0``
    exact rather than numerical.
    """

    def __init__(self, params: KGParams):
        self.params = params
        self._cache: dict[tuple, float] = {}

    def kappa(self, f, h) -> float:
        if f == h:
            return 0.0
        kf, kh = _key(f), _key(h)
        if kf > kh:
            return -self.kappa(h, f)
        val = self._cache.get((f, h))
        if val is None:
            val = self._cache[(f, h)] = kappa(f, h, self.params)
        return val


def peierls_bracket(P: PolynomialFunctional, Q: PolynomialFunctional, ctx: BracketContext) -> PolynomialFunctional:
    """``{F_f, F_h} = kappa(f, h) 1`` extended bilinearly and by the Leibniz rule."""
    out: dict[Monomial, complex] = {}
    for m1, c1 in P.terms.items():
        for m2, c2 in Q.terms.items():
            for i, f in enumerate(m1):
                for j, h in enumerate(m2):
                    k = ctx.kappa(f, h)
                    if k == 0:
                        continue
                    rest = _canon(m1[:i] + m1[i + 1 :] + m2[:j] + m2[j + 1 :])
                    out[rest] = out.get(rest, 0) + c1 * c2 * k
    return PolynomialFunctional(out)


@dataclass(eq=False)
class DiracState:
    """``delta_phi0``; ``phi`` of ``None`` is the zero solution."""

    params: KGParams
    phi: Solution | None = None
    _values: dict = field(default_factory=dict, repr=False)

    @classmethod
    def zero(cls, params: KGParams) -> "DiracState":
        return cls(params)

    def F(self, f) -> float:
        if self.phi is None:
            return 0.0
        val = self._values.get(f)
        if val is None:
            val = self._values[f] = linear_functional(f, self.phi)
        return val

    @property
    def data(self) -> CauchyData:
        if self.phi is None:
            return CauchyData.zeros(self.params.grid)
        return self.phi.data


def eval_functional(P: PolynomialFunctional, nu: DiracState) -> complex:
    total = 0
    for mono, c in P.terms.items():
        total += c * math.prod(nu.F(f) for f in mono)
    return total.real if isinstance(total, complex) and total.imag == 0 else total


# -------------------------------------------------------------------- channels


@dataclass(frozen=True)
class RotationChannel:
    """Localized rotation, optionally about ``center`` (a lattice vector)."""

    rot: LocalizedRotation
    center: tuple[float, ...] | None = None

    def origin(self, d: int) -> np.ndarray:
        return np.zeros(d) if self.center is None else np.asarray(self.center, dtype=float)

    def region(self, d: int) -> DoubleCone:
        return DoubleCone(Ball(self.origin(d), self.rot.r2))

    def inner(self, d: int) -> DoubleCone:
        return DoubleCone(Ball(self.origin(d), self.rot.r1))


@dataclass(frozen=True, eq=False)
class KickChannel:
    """Affine shift ``phi -> phi + psi`` by ``psi = G f_A``."""

    psi: Solution
    source: object = None

    @classmethod
    def from_source(cls, f, params: KGParams) -> "KickChannel":
        return cls(green_solution(f, params), f)

    def region(self, d: int) -> DoubleCone:
        if isinstance(self.source, TestFunction):
            return self.source.enclosing_cone()
        balls = self.psi.support
        if not balls or len(balls) != 1:
            raise UnsupportedLocalization("kick without a single localization ball")
        return DoubleCone(balls[0])


def lattice_shift(grid, center) -> tuple[int, ...]:
    """Integer node offsets for a translation by ``center``."""
    steps = []
    for c in center:
        k = round(c / grid.h)
        if abs(k * grid.h - c) > 1e-9 * max(1.0, abs(c)):
            raise GridMismatch(f"rotation center component {c} is not a multiple of h={grid.h}")
        steps.append(k)
    return tuple(steps)


def _translate(a: np.ndarray, steps) -> np.ndarray:
    """``a(x - k h)``."""
    return np.roll(a, tuple(steps), axis=tuple(range(a.ndim)))


def rotation_on_data(ch: RotationChannel, data: CauchyData, inverse: bool = False) -> CauchyData:
    rot = ch.rot.inverse() if inverse else ch.rot
    if ch.center is None:
        return apply_S(rot, data)
    k = lattice_shift(data.grid, ch.center)
    back = tuple(-s for s in k)
    moved = CauchyData(data.grid, _translate(data.u, back), _translate(data.v, back))
    out = apply_S(rot, moved)
    return CauchyData(data.grid, _translate(out.u, k), _translate(out.v, k))


def _image_generator(ch, f):
    if isinstance(ch, KickChannel):
        return None
    if not isinstance(f, TestFunction):
        raise UnsupportedLocalization(f"rotation channel acts only on bump generators, got {type(f).__name__}")
    o = ch.origin(f.d)
    if f.inside(ch.inner(f.d)):
        return f.rotated(ch.rot.theta, ch.rot.axis, about=o)
    if are_spacelike(f.enclosing_cone(), ch.region(f.d)):
        return f
    raise UnsupportedLocalization(
        "generator straddles the transition shell; use the state-side action instead"
    )


def apply_channel(ch, P: PolynomialFunctional) -> PolynomialFunctional:
    """Functional-side action ``P -> Y P``, multiplicative over monomials."""
    if isinstance(ch, RotationChannel) and ch.rot.theta == 0:
        return PolynomialFunctional(P.terms)
    images: dict = {}
    for f in P.generators():
        if isinstance(ch, KickChannel):
            shift = sigma(green_solution(f, ch.psi.params), ch.psi)
            images[f] = PolynomialFunctional.linear(f) + shift
        elif isinstance(ch, RotationChannel):
            images[f] = PolynomialFunctional.linear(_image_generator(ch, f))
        else:
            raise TypeError(f"unknown channel {type(ch).__name__}")
    out = PolynomialFunctional()
    for mono, c in P.terms.items():
        term = PolynomialFunctional.unit(c)
        for f in mono:
            term = term * images[f]
        out = out + term
    return out


def apply_channel_to_state(ch, nu: DiracState) -> DiracState:
    """``nu o Y``: the Dirac state at ``S^{-1} phi0`` (rotation) or ``phi0 + psi`` (kick)."""
    params = nu.params
    if isinstance(ch, KickChannel):
        if ch.psi.params != params:
            raise GridMismatch("kick and state use different parameters")
        if nu.phi is None:
            return DiracState(params, ch.psi)
        support = _union(nu.phi.support, ch.psi.support)
        return DiracState(params, Solution(nu.phi.data + ch.psi.data, params, support))
    if isinstance(ch, RotationChannel):
        if nu.phi is None or ch.rot.theta == 0:
            return DiracState(params, nu.phi)
        data = rotation_on_data(ch, nu.phi.data, inverse=True)
        support = None
        if nu.phi.support is not None:
            inv = ch.rot.inverse()
            o = ch.origin(params.grid.d)
            support = tuple(rotate_support(inv, b, about=o) for b in nu.phi.support)
        return DiracState(params, Solution(data, params, support))
    raise TypeError(f"unknown channel {type(ch).__name__}")


def _union(a, b):
    if a is None or b is None:
        return None
    return tuple(a) + tuple(b)


def bracket_preservation_check(ch, P, Q, nu: DiracState, ctx: BracketContext) -> float:
    """``|nu({Y P, Y Q}) - nu(Y {P, Q})|``."""
    lhs = eval_functional(peierls_bracket(apply_channel(ch, P), apply_channel(ch, Q), ctx), nu)
    rhs = eval_functional(apply_channel(ch, peierls_bracket(P, Q, ctx)), nu)
    return abs(lhs - rhs)


def _probe_points(f: TestFunction) -> list[Point]:
    pts = f.support_corners()
    for t in f.t_range:
        pts.append(Point(t, f.center))
    return pts


def causal_image_check(ch, f: TestFunction) -> bool:
    """Image generators of ``F_f`` lie in ``J(O_channel) u J(O_f)``."""
    d = f.d
    regions = [ch.region(d), f.enclosing_cone()]
    image = apply_channel(ch, PolynomialFunctional.linear(f))
    for g in image.generators():
        for p in _probe_points(g):
            if not any(in_causal_set(o, p) for o in regions):
                return False
    return True

