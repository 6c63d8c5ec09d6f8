"""Symplectic form on Cauchy data and the pairing it induces on sources."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch
from .green import (
    CauchyData,
    KGParams,
    Solution,
    green_solution,
    pairing_G,
    rfft,
    source_max_time,
    source_moments,
)


@dataclass(frozen=True)
class SymplecticContext:
    params: KGParams

    @property
    def grid(self):
        return self.params.grid

    @property
    def dvol(self) -> float:
        return self.params.grid.cell_volume

    def sigma(self, a: CauchyData, b: CauchyData) -> float:
        for x in (a, b):
            if x.grid != self.grid:
                raise GridMismatch("Cauchy data do not live on the context grid")
        return sigma(a, b)

    def kappa(self, f, h) -> float:
        return kappa(f, h, self.params)


def _data(x) -> CauchyData:
    return x.data if isinstance(x, Solution) else x


def sigma(a, b) -> float:
    """``int (u_a v_b - v_a u_b) dvol`` on the ``t = 0`` lattice."""
    a, b = _data(a), _data(b)
    if a.grid != b.grid:
        raise GridMismatch("sigma needs Cauchy data on the same grid")
    return float(np.sum(a.u * b.v) - np.sum(a.v * b.u)) * a.grid.cell_volume


def kappa(f, h, params: KGParams) -> float:
    """Pairing of ``G``-classes: ``int f (G h)``."""
    return pairing_G(f, h, params)


def linear_functional(f, phi) -> float:
    """``F_f(phi) = int phi f`` for a solution ``phi``.

    Evaluated in momentum space: the time quadrature of ``f`` against the
    propagated spectrum of ``phi`` collapses onto the moments of ``f``.  This
    is a different discretisation path from :func:`pairing_G`, which works
    with position-space slices.
    """
    if not isinstance(phi, Solution):
        raise TypeError("linear_functional needs a Solution")
    params = phi.params
    phi.check_margin(source_max_time(f))
    Mc, Ms = source_moments(f, params)
    U, V = phi.spectra
    X = np.conj(Mc) * U + np.conj(Ms) * V / params.omega
    return params.spectral_sum(X) * params.parseval


def solution_norm(phi, params: KGParams) -> float:
    """One-particle energy norm ``sqrt(1/2 int (omega |u|^2 + |v|^2 / omega))``.

    For ``phi = G f`` this equals ``sqrt(w2(f, f))``.
    """
    d = _data(phi)
    U, V = rfft(d.u), rfft(d.v)
    w = params.omega
    dens = 0.5 * (w * np.abs(U) ** 2 + np.abs(V) ** 2 / w)
    return math.sqrt(params.spectral_sum(dens) * params.parseval)


def signal_scale(f, h, params: KGParams) -> float:
    """Natural scale ``2 ||G f|| ||G h||`` bounding ``|G(f, h)|`` by Cauchy-Schwarz."""
    nf = solution_norm(green_solution(f, params), params)
    nh = solution_norm(green_solution(h, params), params)
    return 2.0 * nf * nh
