"""Drude-bath memory kernels alpha_R (noise) and alpha_I (friction).

Two independent routes to alpha_R: the Matsubara-series closed form and a
direct oscillatory quadrature of the spectral integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .bath import BathSpec, DomainError, NumericalError, nearest_resonance, xcothx

RESONANCE_GUARD = 1e-6 * math.pi


@dataclass(frozen=True)
class KernelValue:
    tau: float
    value: float
    terms_used: int
    truncation_error_estimate: float


def drude_weight(omega, bath: BathSpec):
    """g(w) = (2 M gamma / pi) * wc^2 / (w^2 + wc^2)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("drude_weight is defined for omega >= 0")
    wc = bath.omega_c
    out = (2 * bath.M * bath.gamma / math.pi) * wc**2 / (omega**2 + wc**2)
    return out if out.ndim else float(out)


def alpha_I(tau, bath: BathSpec) -> KernelValue:
    if tau < 0:
        raise DomainError("alpha_I is defined for tau >= 0")
    wc = bath.omega_c
    return KernelValue(tau, -bath.M * bath.gamma * wc**2 * math.exp(-wc * tau), 1, 0.0)


def check_resonance(chi):
    n, dist = nearest_resonance(chi)
    if dist < RESONANCE_GUARD:
        raise DomainError(
            f"chi = {chi!r} is within {RESONANCE_GUARD:.2e} of {n}*pi: the cutoff pole "
            "merges with a Matsubara pole. Perturb T by about one part in 1e6."
        )


def matsubara_rates(bath: BathSpec, n_terms):
    """Decay rates (in units of omega_c) nu_n = n pi / chi, n = 1..n_terms."""
    return np.arange(1, n_terms + 1) * math.pi / bath.chi


def alpha_R_series(tau, bath: BathSpec, rel_tol=1e-13, max_terms=1_000_000) -> KernelValue:
    """alpha_R from the closed form

        M gamma wc^2 [cot(chi) e^{-wc tau}
                      + (2/chi) sum_n nu_n/(nu_n^2 - 1) e^{-nu_n wc tau}],

    nu_n = n pi / chi. Summation stops once the next term is below
    rel_tol * |running sum|; the error estimate is the geometric tail bound of
    the omitted terms.
    """
    if tau <= 0:
        raise DomainError("alpha_R_series needs tau > 0 (the series diverges at tau = 0)")
    chi = bath.chi
    check_resonance(chi)
    x = bath.omega_c * tau
    head = math.exp(-x) / math.tan(chi)
    step = math.pi / chi
    q = math.exp(-step * x)  # ratio of successive exponentials
    total = head
    n = 0
    term = 0.0
    while n < max_terms:
        n += 1
        nu = n * step
        term = (2 / chi) * nu / (nu * nu - 1) * math.exp(-nu * x)
        total += term
        nxt = n + 1
        nu_next = nxt * step
        next_mag = abs((2 / chi) * nu_next / (nu_next**2 - 1)) * math.exp(-nu_next * x)
        if nu_next > 1 and next_mag < rel_tol * abs(total):
            err = next_mag / (1 - q) if q < 1 else math.inf
            scale = bath.M * bath.gamma * bath.omega_c**2
            return KernelValue(tau, scale * total, n + 1, scale * err)
    raise NumericalError("Matsubara series did not converge", estimate=total)


def _integrand(omega, tau, bath: BathSpec, classical=False):
    # g(w) * w * coth(hbar w / 2 kT) * cos(w tau)
    wc = bath.omega_c
    pref = 2 * bath.M * bath.gamma / math.pi * wc**2 / (omega**2 + wc**2)
    if classical:
        thermal = 2 * bath.kT / bath.hbar * np.ones_like(omega)
    else:
        a = bath.hbar / (2 * bath.kT)
        thermal = xcothx(a * omega) / a
    return pref * thermal * np.cos(omega * tau)


def _panel(f, a, b, epsrel):
    val, err = quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=200)
    return val, err


def euler_accelerate(terms):
    """Sum an alternating series via repeated averaging of partial sums
    (Euler / van Wijngaarden). Returns (estimate, error estimate)."""
    s = np.cumsum(terms)
    rows = [s]
    while len(rows[-1]) > 1:
        prev = rows[-1]
        rows.append(0.5 * (prev[1:] + prev[:-1]))
    best = rows[-1][0]
    # compare the two deepest available estimates
    prev_best = rows[-2][-1] if len(rows) > 1 else s[-1]
    return best, abs(best - prev_best)


def alpha_R_quadrature(tau, bath: BathSpec, rel_tol=1e-10, classical=False,
                       n_tail_panels=40, max_panels=20000) -> KernelValue:
    """alpha_R as the spectral integral of g(w) w coth(hbar w/2kT) cos(w tau).

    The half-line is cut at the zeros of cos(w tau); panels are integrated with
    adaptive Gauss-Kronrod, the head (w up to several cutoff/thermal scales)
    summed directly and the alternating tail accelerated. With
    ``classical=True`` coth is replaced by 2kT/(hbar w).
    """
    if tau <= 0:
        raise DomainError("alpha_R_quadrature needs tau > 0")

    def f(w):
        return _integrand(np.asarray(w, dtype=float), tau, bath, classical)

    half = math.pi / tau
    # the tail starts once both the Lorentzian and coth are smooth on a panel scale
    w_head = 8 * max(bath.omega_c, 2 * bath.kT / bath.hbar)
    k_head = max(2, int(math.ceil(w_head / half)))
    if k_head > max_panels:
        raise NumericalError("panel budget exceeded", estimate=None)
    edges = [0.0] + [(k + 0.5) * half for k in range(k_head + n_tail_panels)]
    vals = np.array([_panel(f, a, b, rel_tol * 1e-2)[0] for a, b in zip(edges[:-1], edges[1:])])
    head = vals[:k_head].sum()
    tail, tail_err = euler_accelerate(vals[k_head:])
    value = head + tail
    if tail_err > rel_tol * abs(value) * 1e2:
        raise NumericalError(
            f"oscillatory tail not converged (estimate {tail_err:.2e})", estimate=value)
    return KernelValue(tau, value, len(vals), tail_err)


def dominant_decay_rate(bath: BathSpec) -> float:
    """Slowest exponential rate in the series: min(wc, pi wc / chi) = min(wc, 2 pi kT/hbar)."""
    return min(bath.omega_c, math.pi * bath.omega_c / bath.chi)


def alpha_R_classical(tau, bath: BathSpec) -> float:
    """High-temperature closed form (2 M gamma kT/hbar) wc e^{-wc tau}."""
    return 2 * bath.M * bath.gamma * bath.kT / bath.hbar * bath.omega_c * math.exp(-bath.omega_c * tau)
