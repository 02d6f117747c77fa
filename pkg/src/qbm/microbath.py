"""Discrete-oscillator bath sampled from the Drude spectral weight.

Mode masses are 1; all physics sits in the couplings, fixed by
C_i^2 / (2 m_i w_i^2) = g(w_i) dw_i with g the Drude weight, so that

    alpha_R  ->  sum_i C_i^2/(2 m_i w_i) coth(hbar w_i / 2kT) cos(w_i tau)
    alpha_I  -> -sum_i C_i^2/(2 m_i w_i) sin(w_i tau)

are Riemann sums of the continuum kernels. The friction kernel is the sum
whose tau-derivative is alpha_I,

    K(t) = sum_i C_i^2/(2 m_i w_i^2) cos(w_i t)  ->  M gamma wc e^{-wc t},

and the couplings are rescaled so that K(0) equals the continuum value
truncated at omega_max, M gamma wc (2/pi) arctan(omega_max/wc).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .bath import BathSpec, DomainError, coth
from .kernels import drude_weight


@dataclass(frozen=True)
class ModeEnsemble:
    omegas: np.ndarray
    masses: np.ndarray
    couplings: np.ndarray
    omega_max: float
    scheme: str
    bath: BathSpec

    @property
    def n_modes(self) -> int:
        return self.omegas.size

    @property
    def weights(self) -> np.ndarray:
        """C_i^2 / (2 m_i w_i^2): discrete spectral weight per mode."""
        return self.couplings**2 / (2 * self.masses * self.omegas**2)


def truncated_kernel_at_zero(bath: BathSpec, omega_max) -> float:
    return bath.M * bath.gamma * bath.omega_c * (2 / math.pi) * math.atan(omega_max / bath.omega_c)


def sample_drude(bath: BathSpec, n_modes=10_000, omega_max=None, scheme="grid",
                 seed=0) -> ModeEnsemble:
    """Modes on [0, omega_max] in equal bins: bin midpoints (``grid``) or one
    uniform draw per bin (``stratified``)."""
    omega_max = 50 * bath.omega_c if omega_max is None else omega_max
    if n_modes < 16:
        raise DomainError("n_modes must be >= 16")
    if omega_max < 10 * bath.omega_c:
        raise DomainError("omega_max must be >= 10 omega_c")
    dw = omega_max / n_modes
    left = np.arange(n_modes) * dw
    if scheme == "grid":
        w = left + 0.5 * dw
    elif scheme == "stratified":
        w = left + np.random.default_rng(seed).uniform(0, 1, n_modes) * dw
        w = np.maximum(w, 1e-12 * dw)
    else:
        raise DomainError(f"unknown scheme {scheme!r}")
    weight = drude_weight(w, bath) * dw
    weight *= truncated_kernel_at_zero(bath, omega_max) / weight.sum()
    masses = np.ones(n_modes)
    couplings = np.sqrt(2 * masses * w**2 * weight)
    return ModeEnsemble(w, masses, couplings, float(omega_max), scheme, bath)


def friction_kernel_discrete(ens: ModeEnsemble, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    out = np.cos(np.outer(t, ens.omegas)) @ ens.weights
    return out if out.size > 1 else float(out[0])


def friction_kernel_continuum(bath: BathSpec, t):
    return bath.M * bath.gamma * bath.omega_c * np.exp(-bath.omega_c * np.asarray(t, dtype=float))


def friction_kernel_truncated(bath: BathSpec, t, omega_max):
    """int_0^omega_max g(w) cos(w t) dw by QUADPACK's Fourier rule."""
    def g(w):
        return float(drude_weight(w, bath))

    out = []
    for tt in np.atleast_1d(np.asarray(t, dtype=float)):
        if tt > 0:
            val = quad(g, 0, omega_max, weight="cos", wvar=tt, limit=400)[0]
        else:
            val = quad(g, 0, omega_max, limit=400)[0]
        out.append(val)
    return np.array(out)


def alpha_R_discrete(ens: ModeEnsemble, tau, T=None):
    """sum_i C_i^2/(2 m_i w_i) coth(hbar w_i / 2kT) cos(w_i tau)."""
    b = ens.bath
    T = b.T if T is None else T
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    amp = ens.weights * ens.omegas * coth(b.hbar * ens.omegas / (2 * b.kB * T))
    out = np.cos(np.outer(tau, ens.omegas)) @ amp
    return out if out.size > 1 else float(out[0])


def alpha_I_discrete(ens: ModeEnsemble, tau):
    """-sum_i C_i^2/(2 m_i w_i) sin(w_i tau)."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    out = -(np.sin(np.outer(tau, ens.omegas)) @ (ens.weights * ens.omegas))
    return out if out.size > 1 else float(out[0])


def validity_window(ens: ModeEnsemble) -> float:
    """Time before the discrete sum starts to recur: a quarter of the
    recurrence period 2 pi / dw = 2 pi N / omega_max."""
    return 0.5 * math.pi * ens.n_modes / ens.omega_max


def kernel_table(ens: ModeEnsemble, t):
    """Rows (t, discrete, continuum, rel_error) against M gamma wc e^{-wc t}."""
    disc = np.atleast_1d(friction_kernel_discrete(ens, t))
    cont = friction_kernel_continuum(ens.bath, t)
    return np.column_stack([np.atleast_1d(t), disc, cont, np.abs(disc - cont) / np.abs(cont)])
