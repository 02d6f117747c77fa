"""Bath parameters and shared numerical helpers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Input outside the domain where a formula or algorithm is valid."""


class NumericalError(RuntimeError):
    """An iterative routine failed to converge or produced non-finite values."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class BathSpec:
    """Free particle of mass ``M`` coupled to a Drude bath.

    Natural units (hbar = kB = M = gamma = 1) are the defaults; every formula
    keeps the constants explicit so SI values are just different inputs.
    """

    T: float
    M: float = 1.0
    gamma: float = 1.0
    omega_c: float = 20.0
    hbar: float = 1.0
    kB: float = 1.0

    def __post_init__(self):
        for name in ("M", "gamma", "omega_c", "T", "hbar", "kB"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        if self.gamma / self.omega_c > 0.1:
            warnings.warn(
                f"gamma/omega_c = {self.gamma / self.omega_c:.3g} > 0.1; "
                "the local effective action assumes gamma << omega_c",
                stacklevel=3,
            )

    @classmethod
    def from_theta(cls, theta, **kwargs) -> "BathSpec":
        """Build from the dimensionless temperature theta = kB*T/(hbar*gamma)."""
        hbar = kwargs.get("hbar", 1.0)
        gamma = kwargs.get("gamma", 1.0)
        kB = kwargs.get("kB", 1.0)
        if not theta > 0:
            raise DomainError(f"theta must be positive, got {theta!r}")
        return cls(T=theta * hbar * gamma / kB, **kwargs)

    @property
    def chi(self) -> float:
        return self.hbar * self.omega_c / (2 * self.kB * self.T)

    @property
    def u(self) -> float:
        return self.hbar * self.gamma / (2 * self.kB * self.T)

    @property
    def theta(self) -> float:
        return self.kB * self.T / (self.hbar * self.gamma)

    @property
    def kT(self) -> float:
        return self.kB * self.T


def _ucothu_series_coefficients(n_terms=20):
    # u coth u = 1 + sum_n (-1)^{n+1} 2 zeta(2n) (u/pi)^{2n}
    from scipy.special import zeta

    n = np.arange(1, n_terms + 1)
    return (-1.0) ** (n + 1) * 2 * zeta(2.0 * n) / math.pi ** (2 * n)


_UCOTHU_SERIES = _ucothu_series_coefficients()


def ucothu_minus_one(u):
    """u*coth(u) - 1 without cancellation: Bernoulli series for |u| < 1
    (terms shrink like (u/pi)^2), direct formula above."""
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    small = au < 1.0
    out = np.empty_like(au)
    s = au[small] ** 2
    acc = np.zeros_like(s)
    for c in _UCOTHU_SERIES[::-1]:
        acc = (acc + c) * s
    out[small] = acc
    big = ~small
    out[big] = au[big] / np.tanh(au[big]) - 1.0
    return out if out.ndim else float(out)


def xcothx(x):
    """x*coth(x) with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    return ucothu_minus_one(x) + 1.0


def coth(x):
    return 1.0 / np.tanh(x)


def check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite values in {what}")


def nearest_resonance(chi):
    """Return (n, |chi - n*pi|) for the closest n >= 1."""
    n = max(1, int(round(chi / math.pi)))
    return n, abs(chi - n * math.pi)
