"""Gaussian vacuum of the free Klein-Gordon field.

Conventions, fixed by requiring ``2 Im w2(f, h) = G(f, h)`` and consistency
of the Weyl relations with the classical Green operator:

* ``f^(omega, p) = int dt d^dx exp(+i omega t - i p.x) f(t, x)``
* ``w2(f, h) = int d^dp / ((2 pi)^d 2 omega_p)  conj(f^) h^``
* ``W(f) W(h) = exp(-i G(f, h)) W(h) W(f)``, ``W(f) W(h) = exp(-i G(f, h) / 2) W(f + h)``
* ``omega(W(f)) = exp(-w2(f, f) / 2)``
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GeometryViolation
from .fields import TestFunction
from .geometry import ScenarioGeometry
from .green import KGParams, pairing_G, source_moments

CONVENTION = {
    "fourier_time_sign": "+i omega t",
    "fourier_space_sign": "-i p.x",
    "measure": "d^dp / ((2 pi)^d 2 omega_p)",
    "weyl_exchange_phase": "exp(-i G(f,h))",
    "weyl_product_phase": "exp(-i G(f,h)/2)",
    "vacuum_weyl": "exp(-w2(f,f)/2)",
    "imaginary_part": "2 Im w2(f,h) = G(f,h)",
    "on_shell": "time quadrature evaluated at omega = sqrt(|p|^2 + m^2)",
}


@dataclass(frozen=True)
class VacuumContext:
    params: KGParams
    hermite_nodes: int = 128
    convention: dict = field(default_factory=lambda: dict(CONVENTION), compare=False, hash=False)

    @cached_property
    def _hermite(self):
        x, w = np.polynomial.hermite.hermgauss(self.hermite_nodes)
        return x, w / math.sqrt(math.pi)

    def two_point(self, f, h) -> complex:
        return two_point(f, h, self.params)

    def G(self, f, h) -> float:
        return pairing_G(f, h, self.params)

    def gaussian_mean(self, g, variance: float, shift: float = 0.0) -> float:
        """``E[g(X + shift)]`` for ``X ~ N(0, variance)``."""
        x, w = self._hermite
        return float(np.sum(w * g(math.sqrt(2.0 * max(variance, 0.0)) * x + shift)))


def two_point(f, h, params: KGParams) -> complex:
    """Mass-shell quadrature of the vacuum two-point function."""
    a, b = source_moments(f, params)
    a2, b2 = source_moments(h, params)
    denom = 2.0 * params.omega
    re = params.spectral_sum((np.conj(a) * a2 + np.conj(b) * b2) / denom)
    im = params.spectral_sum((np.conj(a) * b2 - np.conj(b) * a2) / denom)
    return complex(re, im) * params.parseval


@dataclass(frozen=True)
class WeylWord:
    """``W(s_1 f_1) ... W(s_k f_k)``, optionally with ``Phi(field)`` inserted before factor ``position``."""

    factors: tuple[tuple[object, float], ...] = ()
    field: object = None
    position: int = 0

    @classmethod
    def conjugation(cls, h, inner: "WeylWord | None" = None, scale: float = 1.0) -> "WeylWord":
        """``W(h) X W(h)*`` for a word ``X`` (possibly with a field insertion)."""
        inner = inner or cls()
        factors = ((h, scale),) + inner.factors + ((h, -scale),)
        return cls(factors, inner.field, inner.position + 1 if inner.field is not None else 0)


def weyl_vacuum(word: WeylWord, ctx: VacuumContext) -> complex:
    fs = word.factors
    phase = 0.0
    gauss = 0.0
    for i, (fi, si) in enumerate(fs):
        gauss += si * si * ctx.two_point(fi, fi).real
        for j in range(i + 1, len(fs)):
            fj, sj = fs[j]
            phase += si * sj * ctx.G(fi, fj)
            gauss += 2.0 * si * sj * ctx.two_point(fi, fj).real
    value = cmath.exp(-0.5j * phase) * math.exp(-0.5 * gauss)
    if word.field is None:
        return value
    c, p = word.field, word.position
    lin = 0.0
    re = 0.0
    for i, (fi, si) in enumerate(fs):
        g = si * ctx.G(fi, c)
        lin += -0.5 * g if i < p else 0.5 * g
        re += si * ctx.two_point(fi, c).real
    return -1j * value * (1j * lin - re)


def field_shift(f, h, params: KGParams) -> float:
    """``W(h) Phi(f) W(h)* = Phi(f) + G(f, h)``."""
    return pairing_G(f, h, params)


def field_shift_from_two_point(f, h, params: KGParams) -> float:
    """The same shift recovered from the imaginary part of the two-point function."""
    return 2.0 * two_point(f, h, params).imag


def g_n(n: int):
    return lambda x: x / (1.0 + x * x / n)


def tn_expectation_defect(n: int, f, h, ctx: VacuumContext) -> float:
    """``omega(T_n) - omega(W(h) T_n W(h)*)`` with ``T_n = g_n(Phi(f))``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    var = ctx.two_point(f, f).real
    a = ctx.G(f, h)
    g = g_n(n)
    return ctx.gaussian_mean(g, var) - ctx.gaussian_mean(g, var, a)


def quantum_scenario(
    c: TestFunction,
    h: TestFunction,
    theta: float,
    geometry: ScenarioGeometry,
    ctx: VacuumContext,
    n: int = 1000,
) -> dict:
    """Baseline, Alice-only and Alice-then-Bob expectations of ``Phi(c)``.

    Bob's localized implementer acts on observables of ``O(r1)`` like the global
    rotation, so with the rotation-invariant vacuum it suffices to rotate ``c``.
    """
    geometry.require_valid()
    problems = []
    if not h.inside(geometry.o_minus):
        problems.append("Alice's test function must lie in O(-)")
    if not c.inside(geometry.o_plus):
        problems.append("Charlie's test function must lie in O(+)")
    if problems:
        raise GeometryViolation("; ".join(problems))
    rc = c.rotated(theta, geometry.axis)
    field_c = WeylWord(field=c)
    baseline = weyl_vacuum(field_c, ctx)
    alice = weyl_vacuum(WeylWord.conjugation(h, field_c), ctx)
    both = weyl_vacuum(WeylWord.conjugation(h, WeylWord(field=rc)), ctx)
    return {
        "baseline": baseline.real,
        "alice_only": alice.real,
        "alice_and_bob": both.real,
        "alice_only_imag": alice.imag,
        "alice_and_bob_imag": both.imag,
        "G_c_h": ctx.G(c, h),
        "G_Rc_h": ctx.G(rc, h),
        "tn_n": n,
        "tn_defect_alice_only": tn_expectation_defect(n, c, h, ctx),
        "tn_defect_alice_and_bob": tn_expectation_defect(n, rc, h, ctx),
    }
