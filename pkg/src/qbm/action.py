"""Local effective action obtained by resumming the nonlocal influence action.

Taylor-expanding q_-(s) about s = tau turns the real part of the influence
action into a series in derivatives of q_-:

    Sigma_R = -(M gamma wc / hbar chi) [ q_-^2
              - 2 sum_{l>=1} (q_-^{(l)})^2 (-1)^l / wc^{2l} S_l(chi) ],
    S_l(chi) = sum_{m=0}^{l} (chi/pi)^{2m} zeta(2m).

For a free particle q^{(l)} = (-gamma)^{l-1} qdot, so the l-th term weighs
qdot_-^2 / gamma^2 by c_l = (-1)^l (gamma/wc)^{2l} S_l and the series sums to
the bracket x coth(x)/(1 + r^2) - 1 with r = gamma/wc, x = r chi.

Boundary (total-derivative) terms and transients ~exp(-kB T tau / hbar) are not
represented: the result describes the bulk Lagrangian for tau >> hbar/kB T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import zeta

from .bath import BathSpec, DomainError, ucothu_minus_one, xcothx

ZETA_CACHE_MAX = 64


@lru_cache(maxsize=1)
def _zeta_even_table():
    table = np.empty(ZETA_CACHE_MAX + 1)
    table[0] = -0.5
    table[1:] = zeta(2.0 * np.arange(1, ZETA_CACHE_MAX + 1))
    return table


def zeta_even(m: int) -> float:
    """zeta(2m) for m >= 0, with zeta(0) = -1/2."""
    if m < 0:
        raise DomainError("m must be >= 0")
    if m <= ZETA_CACHE_MAX:
        return float(_zeta_even_table()[m])
    return 1.0


def zeta_partial_sums(L: int, chi: float) -> np.ndarray:
    """Array of S_0..S_L."""
    if L < 0 or chi <= 0:
        raise DomainError("need L >= 0 and chi > 0")
    m = np.arange(L + 1)
    z = np.array([zeta_even(k) for k in m])
    y2 = (chi / math.pi) ** 2
    # y2**m computed by repeated multiplication keeps large-m terms finite
    powers = np.cumprod(np.concatenate(([1.0], np.full(L, y2))))
    return np.cumsum(powers * z)


def zeta_partial_sum(l: int, chi: float) -> float:
    return float(zeta_partial_sums(l, chi)[-1])


def zeta_series_limit(chi: float) -> float:
    """S_inf = -(chi/2) cot(chi), valid for chi < pi."""
    return -0.5 * chi / math.tan(chi)


def sigma_r_series_coefficient(l: int, bath: BathSpec) -> float:
    if l < 1:
        raise DomainError("l must be >= 1")
    r2 = (bath.gamma / bath.omega_c) ** 2
    return (-1) ** l * r2**l * zeta_partial_sum(l, bath.chi)


def sigma_r_coefficients(L: int, bath: BathSpec) -> np.ndarray:
    """c_1..c_L in one pass."""
    S = zeta_partial_sums(L, bath.chi)[1:]
    r2 = (bath.gamma / bath.omega_c) ** 2
    l = np.arange(1, L + 1)
    return (-r2) ** l * S


def bracket(bath: BathSpec) -> float:
    """(gamma chi/wc) coth(gamma chi/wc) / (1 + (gamma/wc)^2) - 1."""
    r = bath.gamma / bath.omega_c
    return xcothx(r * bath.chi) / (1 + r * r) - 1


def effective_alpha(bath: BathSpec) -> float:
    """alpha = (u coth u - 1)/gamma^2, u = hbar gamma / 2 kB T (units time^2)."""
    return ucothu_minus_one(bath.u) / bath.gamma**2


@dataclass(frozen=True)
class EffectiveAction:
    coeff_qminus_sq: float
    alpha: float
    bracket: float
    friction_coeff: float
    gamma_over_omega_c: float
    chi_below_pi: bool
    local_regime: bool


def effective_action(bath: BathSpec) -> EffectiveAction:
    """Coefficients of

        (i/hbar) int [M/2 qdot_+ qdot_- - gamma M q_- qdot_+]
        - (2 kB T gamma M / hbar^2) int [q_-^2 + alpha qdot_-^2].
    """
    r = bath.gamma / bath.omega_c
    return EffectiveAction(
        coeff_qminus_sq=2 * bath.kT * bath.gamma * bath.M / bath.hbar**2,
        alpha=effective_alpha(bath),
        bracket=bracket(bath),
        friction_coeff=sigma_i_coefficient(bath),
        gamma_over_omega_c=r,
        chi_below_pi=bath.chi < math.pi,
        local_regime=r <= 0.1,
    )


def sigma_r_closed_form(q_minus, qdot_minus, bath: BathSpec):
    pref = bath.M * bath.gamma * bath.omega_c / (bath.hbar * bath.chi)
    return -pref * (np.square(q_minus) + np.square(qdot_minus) / bath.gamma**2 * bracket(bath))


def sigma_i_coefficient(bath: BathSpec) -> float:
    """Prefactor gamma M / hbar of Sigma_I; carries no temperature dependence."""
    return bath.gamma * bath.M / bath.hbar


def sigma_i(q_minus, qdot_plus, bath: BathSpec):
    """Sigma_I = -(i gamma M / hbar) q_- qdot_+."""
    return -1j * sigma_i_coefficient(bath) * np.multiply(q_minus, qdot_plus)


@dataclass(frozen=True)
class ResummationResult:
    partial_sums: np.ndarray
    target: float
    converged_at: int | None

    @property
    def passed(self) -> bool:
        return self.converged_at is not None


def resummation_check(bath: BathSpec, L: int = 200, rel_tol=1e-8) -> ResummationResult:
    """Accumulate -2 sum_{l<=L} c_l and compare with the closed-form bracket."""
    r = bath.gamma / bath.omega_c
    if not (r < 1 and bath.chi < math.pi):
        raise DomainError(
            f"resummation series only used for gamma/wc < 1 and chi < pi "
            f"(got {r:.3g}, {bath.chi:.3g}); only the closed form is valid there")
    partial = -2 * np.cumsum(sigma_r_coefficients(L, bath))
    target = bracket(bath)
    ok = np.nonzero(np.abs(partial - target) <= rel_tol * abs(target))[0]
    return ResummationResult(partial, target, int(ok[0]) + 1 if ok.size else None)
