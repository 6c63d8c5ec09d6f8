"""Independent reference computations used by the tests.

None of these reuse the package's numerics: integrals go through adaptive
``scipy.integrate.quad``, the flow through a hand-written RK4 on the vector
field, Gaussian expectations through direct integration against the density.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate


def mollifier(s: float) -> float:
    """``1 - S(s)`` with ``S(x) = q(x) / (q(x) + q(1 - x))``, ``q(x) = exp(-1/x)``."""
    if s <= 0.0:
        return 1.0
    if s >= 1.0:
        return 0.0
    q = math.exp(-1.0 / s)
    p = math.exp(-1.0 / (1.0 - s))
    return 1.0 - q / (q + p)


def sphere_area(d: int) -> float:
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def spatial_integral(rho: float, d: int) -> float:
    """``int eta(|x| / rho) d^dx`` by radial quadrature."""
    val, _ = integrate.quad(lambda s: mollifier(s) * s ** (d - 1), 0.0, 1.0, epsabs=0, epsrel=1e-13, limit=200)
    return sphere_area(d) * rho**d * val


def time_integral(T: float) -> float:
    val, _ = integrate.quad(lambda s: mollifier(abs(s)), -1.0, 1.0, points=[0.0], epsabs=0, epsrel=1e-13, limit=200)
    return T * val


def bump_integral(f) -> float:
    return f.amplitude * time_integral(f.half_width) * spatial_integral(f.radius, f.d)


def rk4_flow(field, x0, theta: float, steps: int = 2000) -> np.ndarray:
    """Integrate ``dx/ds = field(x)`` from ``s = 0`` to ``theta``."""
    x = np.asarray(x0, dtype=float).copy()
    h = theta / steps
    for _ in range(steps):
        k1 = field(x)
        k2 = field(x + 0.5 * h * k1)
        k3 = field(x + 0.5 * h * k2)
        k4 = field(x + h * k3)
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def rotation_field(r1: float, r2: float):
    """``eta(r) (x1 d/dx2 - x2 d/dx1)`` with the same cutoff shape as the package default."""

    def field(x):
        r = float(np.linalg.norm(x))
        e = mollifier((r - r1) / (r2 - r1))
        v = np.zeros_like(x)
        v[0], v[1] = -e * x[1], e * x[0]
        return v

    return field


def gaussian_expectation(g, variance: float, shift: float = 0.0) -> float:
    """``E[g(X + shift)]`` for ``X ~ N(0, variance)`` by adaptive quadrature."""
    sd = math.sqrt(variance)

    def integrand(x):
        return g(x + shift) * math.exp(-0.5 * (x / sd) ** 2) / (sd * math.sqrt(2 * math.pi))

    val, _ = integrate.quad(integrand, -40 * sd, 40 * sd, epsabs=1e-15, epsrel=1e-13, limit=400)
    return val


def kg_time_residual(sol, t: float, dt: float) -> np.ndarray:
    """``(phi(t+dt) - 2 phi(t) + phi(t-dt)) / dt^2 - Delta phi + m^2 phi`` with a 4th-order FD Laplacian."""
    g = sol.params.grid
    u0, up, um = sol.at(t), sol.at(t + dt), sol.at(t - dt)
    lap = np.zeros_like(u0)
    for ax in range(g.d):
        lap += (
            -np.roll(u0, 2, ax) + 16 * np.roll(u0, 1, ax) - 30 * u0 + 16 * np.roll(u0, -1, ax) - np.roll(u0, -2, ax)
        ) / (12 * g.h**2)
    return (up - 2 * u0 + um) / dt**2 - lap + sol.params.mass**2 * u0
