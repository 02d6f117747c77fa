"""Diffusion constants of the Dekker-form master equation and the positivity
functional Delta(T).

All sweeps use the dimensionless temperature theta = kB*T/(hbar*gamma); the
recurring variable is u = hbar*gamma/(2 kB T) = 1/(2 theta).

Unit convention: D_pq is evaluated exactly as ``4 kB T [u coth u - 1]`` (an
energy). It enters d<qp>/dt directly, and Delta = D_pp D_qq - D_pq**2 -
hbar**2 gamma**2 / 4 is dimensionally consistent in units of (hbar gamma)**2.

High-temperature expansions (u -> 0):

    D_qq = hbar**2 gamma / (6 M kB T) * (1 - u**2/15 + ...)
    D_pq = hbar**2 gamma**2 / (3 kB T) * (1 - u**2/15 + ...)
    D_pp = 2 M gamma kB T * (1 + (1/3) (hbar gamma / kB T)**2 + ...)

The D_pp correction coefficient from expanding the exact formula is 1/3.
Only the leading orders are used as reference values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bath import BathSpec, DomainError, NumericalError, ucothu_minus_one


@dataclass(frozen=True)
class DiffusionSet:
    T: float
    gamma: float
    D_qq: float
    D_pq: float
    D_pp: float
    Delta: float
    hbar: float = 1.0
    M: float = 1.0
    kB: float = 1.0

    @property
    def theta(self) -> float:
        return self.kB * self.T / (self.hbar * self.gamma)

    @property
    def delta_reduced(self) -> float:
        return delta_reduced(self.theta) * (self.hbar * self.gamma) ** 2

    @classmethod
    def free(cls, bath: BathSpec) -> "DiffusionSet":
        """No damping and no diffusion: unitary free-particle dynamics."""
        return cls(bath.T, 0.0, 0.0, 0.0, 0.0, 0.0, bath.hbar, bath.M, bath.kB)


def diffusion_constants(bath: BathSpec) -> DiffusionSet:
    kT = bath.kT
    u = bath.u
    w = ucothu_minus_one(u)
    D_qq = 2 * kT / (bath.M * bath.gamma) * w
    D_pq = 4 * kT * w
    # (2 hbar gamma / kT) coth u - 3 == 4 (u coth u - 1) + 1
    D_pp = 2 * bath.M * bath.gamma * kT * (4 * w + 1)
    d = DiffusionSet(bath.T, bath.gamma, D_qq, D_pq, D_pp, 0.0,
                     bath.hbar, bath.M, bath.kB)
    return DiffusionSet(bath.T, bath.gamma, D_qq, D_pq, D_pp, delta(d),
                        bath.hbar, bath.M, bath.kB)


def delta(d: DiffusionSet) -> float:
    """Positivity functional D_pp D_qq - D_pq^2 - hbar^2 gamma^2 / 4."""
    return d.D_pp * d.D_qq - d.D_pq**2 - (d.hbar * d.gamma) ** 2 / 4


def delta_reduced(theta):
    """Delta / (hbar gamma)^2 = (u coth u - 1)/u^2 - 1/4, u = 1/(2 theta).

    Follows from Delta = 4 (kB T)^2 (u coth u - 1) - (hbar gamma)^2/4; used only
    as a cross-check of :func:`delta`.
    """
    theta = np.asarray(theta, dtype=float)
    u = 1 / (2 * theta)
    return ucothu_minus_one(u) / u**2 - 0.25


def zero_temperature_limits(M=1.0, gamma=1.0, hbar=1.0) -> dict:
    """T -> 0 values of the constants (coth u -> 1, kB T u -> hbar gamma / 2)."""
    return {
        "D_qq": hbar / M,
        "D_pq": 2 * hbar * gamma,
        "D_pp": 4 * M * hbar * gamma**2,
        "Delta": -(hbar * gamma) ** 2 / 4,
    }


def high_T_expansion(bath: BathSpec) -> dict:
    """Leading term and first correction of each constant for theta >> 1.

    Returns ``{name: (leading, leading_plus_correction)}``.
    """
    if bath.theta <= 10:
        warnings.warn(f"theta = {bath.theta:.3g} <= 10: high-T expansion unreliable",
                      stacklevel=2)
    kT, M, g, hb = bath.kT, bath.M, bath.gamma, bath.hbar
    u2 = bath.u**2
    qq = hb**2 * g / (6 * M * kT)
    pq = hb**2 * g**2 / (3 * kT)
    pp = 2 * M * g * kT
    return {
        "D_qq": (qq, qq * (1 - u2 / 15)),
        "D_pq": (pq, pq * (1 - u2 / 15)),
        "D_pp": (pp, pp * (1 + (hb * g / kT) ** 2 / 3)),
        "Delta": ((hb * g) ** 2 / 12, (hb * g) ** 2 * (1 / 12 - u2 / 45)),
    }


@dataclass(frozen=True)
class CriticalPoint:
    theta0: float
    T0: float
    u_star: float
    iterations: int


def bisect(f, a, b, rtol=1e-12, maxiter=200):
    """Plain bracketed bisection; returns (root, iterations)."""
    fa, fb = f(a), f(b)
    if fa == 0:
        return a, 0
    if fb == 0:
        return b, 0
    if np.sign(fa) == np.sign(fb):
        raise NumericalError(f"root not bracketed on [{a}, {b}]")
    for it in range(1, maxiter + 1):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0 or (b - a) <= rtol * abs(m):
            return m, it
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b), maxiter


def critical_temperature(gamma=1.0, hbar=1.0, kB=1.0, M=1.0, rtol=1e-12) -> CriticalPoint:
    """Temperature where Delta changes sign, by bisection on theta in [0.01, 10].

    The root is found on Delta computed through the three constants; u* is the
    matching root of (u coth u - 1)/u^2 = 1/4.
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")

    def f(theta):
        return delta(diffusion_constants(BathSpec(T=theta * hbar * gamma / kB, M=M,
                                                  gamma=gamma, omega_c=1e3 * gamma,
                                                  hbar=hbar, kB=kB)))

    theta0, it = bisect(f, 0.01, 10.0, rtol=rtol)
    return CriticalPoint(theta0, theta0 * hbar * gamma / kB, 1 / (2 * theta0), it)


def theta_grid(theta_min, theta_max, n_points, log=True):
    if not (0 < theta_min < theta_max) or n_points < 2:
        raise DomainError("need 0 < theta_min < theta_max and n_points >= 2")
    if log:
        return np.geomspace(theta_min, theta_max, n_points)
    return np.linspace(theta_min, theta_max, n_points)


def sweep(theta_values, M=1.0, gamma=1.0, hbar=1.0, kB=1.0):
    """Rows (theta, T, D_qq, D_pq, D_pp, Delta) in input order."""
    rows = []
    for th in theta_values:
        b = BathSpec(T=th * hbar * gamma / kB, M=M, gamma=gamma, omega_c=1e3 * gamma,
                     hbar=hbar, kB=kB)
        d = diffusion_constants(b)
        rows.append((float(th), b.T, d.D_qq, d.D_pq, d.D_pp, d.Delta))
    return rows


