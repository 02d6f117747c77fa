"""Closed Gaussian-moment dynamics of the master equation.

Taking Tr(A drho/dt) for A in {q, p, q^2, p^2, (qp+pq)/2} gives

    d<q>/dt    = <p>/M
    d<p>/dt    = -2 gamma <p>
    d s_qq/dt  = 2 s_qp / M + 2 D_qq
    d s_qp/dt  = s_pp / M - 2 gamma s_qp + S_PQ * D_pq
    d s_pp/dt  = -4 gamma s_pp + 2 D_pp

with S_PQ = -2. The sign is cross-checked against moments extracted from the
grid integration of the master equation (tests/test_meq_grid.py).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm

from .bath import BathSpec, DomainError
from .coefficients import DiffusionSet

S_PQ = -2.0


@dataclass(frozen=True)
class GaussianMoments:
    mq: float
    mp: float
    sqq: float
    spp: float
    sqp: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        if not (self.sqq > 0 and self.spp > 0):
            raise DomainError("variances must be positive")

    def as_array(self):
        return np.array([self.mq, self.mp, self.sqq, self.spp, self.sqp])

    @classmethod
    def from_array(cls, a, t=0.0):
        return cls(*map(float, a), t=t)

    @classmethod
    def minimum_uncertainty(cls, q0, p0, sigma0, hbar=1.0):
        """Pure Gaussian packet: s_qq = sigma0^2, s_pp = hbar^2/(4 sigma0^2)."""
        return cls(q0, p0, sigma0**2, hbar**2 / (4 * sigma0**2), 0.0)


def squeezed(q0, p0, ratio, angle, hbar=1.0, length=1.0):
    """Minimum-uncertainty Gaussian squeezed by ``ratio`` along an axis at
    ``angle`` in the phase plane scaled by (length, hbar/length).

    In scaled coordinates the covariance is (1/2) R diag(ratio, 1/ratio) R^T,
    so the uncertainty product is exactly hbar^2/4 for every ratio and angle.
    """
    c, s = math.cos(angle), math.sin(angle)
    a, b = ratio / 2, 1 / (2 * ratio)
    xx = c * c * a + s * s * b
    pp = s * s * a + c * c * b
    xp = c * s * (a - b)
    p_scale = hbar / length
    return GaussianMoments(q0, p0, xx * length**2, pp * p_scale**2, xp * hbar)


def moment_rhs(y, d: DiffusionSet, bath: BathSpec, s_pq=S_PQ):
    mq, mp, sqq, spp, sqp = y
    M, g = bath.M, d.gamma
    return np.array([
        mp / M,
        -2 * g * mp,
        2 * sqp / M + 2 * d.D_qq,
        -4 * g * spp + 2 * d.D_pp,
        spp / M - 2 * g * sqp + s_pq * d.D_pq,
    ])


def generator(d: DiffusionSet, bath: BathSpec, s_pq=S_PQ):
    """Affine form dy/dt = A y + b of :func:`moment_rhs`.

    The damping rate is taken from ``d.gamma`` so that :meth:`DiffusionSet.free`
    switches it off together with the diffusion constants.
    """
    M, g = bath.M, d.gamma
    A = np.zeros((5, 5))
    A[0, 1] = 1 / M
    A[1, 1] = -2 * g
    A[2, 4] = 2 / M
    A[3, 3] = -4 * g
    A[4, 3] = 1 / M
    A[4, 4] = -2 * g
    b = np.array([0.0, 0.0, 2 * d.D_qq, 2 * d.D_pp, s_pq * d.D_pq])
    return A, b


def stationary(d: DiffusionSet, bath: BathSpec, s_pq=S_PQ):
    """Fixed point of (s_pp, s_qp) and the late-time slope of s_qq."""
    spp = d.D_pp / (2 * d.gamma)
    sqp = (spp / bath.M + s_pq * d.D_pq) / (2 * d.gamma)
    slope = 2 * sqp / bath.M + 2 * d.D_qq
    return {"spp": spp, "sqp": sqp, "sqq_slope": slope}


def uncertainty_product(m) -> float:
    if isinstance(m, GaussianMoments):
        return m.sqq * m.spp - m.sqp**2
    m = np.asarray(m)
    return m[..., 2] * m[..., 3] - m[..., 4] ** 2


def is_physical(m, hbar=1.0, tol=1e-9) -> bool:
    return uncertainty_product(m) >= hbar**2 / 4 - tol


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # (n_samples, 5): mq, mp, sqq, spp, sqp

    @property
    def uncertainty(self):
        return uncertainty_product(self.y)

    def at(self, i) -> GaussianMoments:
        return GaussianMoments.from_array(self.y[i], t=float(self.t[i]))

    def columns(self):
        return {"t": self.t, "mq": self.y[:, 0], "mp": self.y[:, 1], "sqq": self.y[:, 2],
                "spp": self.y[:, 3], "sqp": self.y[:, 4], "uncertainty_product": self.uncertainty}


def default_dt(bath: BathSpec) -> float:
    return 0.01 / max(bath.gamma, 1.0 / bath.M)


def evolve(m0: GaussianMoments, d: DiffusionSet, bath: BathSpec, t_end, dt=None,
           sample_every=None, s_pq=S_PQ) -> Trajectory:
    """Classic RK4 on the five moments; samples every ``sample_every`` time units
    (default: every step). ``t_end`` is hit exactly."""
    if t_end < 0:
        raise DomainError("t_end must be >= 0")
    dt = default_dt(bath) if dt is None else dt
    n = max(1, int(math.ceil(t_end / dt - 1e-12)))
    h = t_end / n if t_end > 0 else 0.0
    stride = 1 if sample_every is None else max(1, int(round(sample_every / h))) if h else 1
    A, b = generator(d, bath, s_pq)

    def f(y):
        return A @ y + b

    y = m0.as_array()
    ts, ys = [m0.t], [y.copy()]
    for k in range(1, n + 1 if t_end > 0 else 1):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if k % stride == 0 or k == n:
            ts.append(m0.t + k * h)
            ys.append(y.copy())
    return Trajectory(np.array(ts), np.array(ys))


def evolve_exact(m0: GaussianMoments, d: DiffusionSet, bath: BathSpec, times, s_pq=S_PQ):
    """Matrix-exponential solution of the affine moment ODE at ``times``."""
    A, b = generator(d, bath, s_pq)
    # augment to a homogeneous 6x6 system
    G = np.zeros((6, 6))
    G[:5, :5] = A
    G[:5, 5] = b
    y0 = np.append(m0.as_array(), 1.0)
    times = np.asarray(times, dtype=float)
    ys = np.array([expm(G * (t - m0.t)) @ y0 for t in times])[:, :5]
    return Trajectory(times, ys)


def squeeze_scan(d: DiffusionSet, bath: BathSpec, t_end=None, ratios=None, angles=None,
                 hbar=None, dt_sample=None):
    """Search minimum-uncertainty initial Gaussians for a drop of the
    uncertainty product below hbar^2/4.

    Ratios: 41 geometric values in [1e-2, 1e2]; angles: squeeze axis
    orientations in [0, pi). Sampling cadence gamma*dt = 0.01. Returns the
    worst case found as ``(min_product - hbar^2/4, ratio, angle, t)``.
    """
    hbar = bath.hbar if hbar is None else hbar
    t_end = 5 / bath.gamma if t_end is None else t_end
    ratios = np.geomspace(1e-2, 1e2, 41) if ratios is None else ratios
    angles = np.linspace(0, math.pi, 24, endpoint=False) if angles is None else angles
    dt_sample = 0.01 / bath.gamma if dt_sample is None else dt_sample
    length = math.sqrt(hbar / (bath.M * bath.gamma))
    G = np.zeros((6, 6))
    G[:5, :5], G[:5, 5] = generator(d, bath)
    step = expm(G * dt_sample).T
    n_steps = int(round(t_end / dt_sample))
    grid = [(float(r), float(a)) for r in ratios for a in angles]
    y = np.array([np.append(squeezed(0.0, 0.0, r, a, hbar=hbar, length=length).as_array(), 1.0)
                  for r, a in grid])
    best_gap = np.full(len(grid), np.inf)
    best_t = np.zeros(len(grid))
    for k in range(1, n_steps + 1):
        y = y @ step
        gap = y[:, 2] * y[:, 3] - y[:, 4] ** 2 - hbar**2 / 4
        better = gap < best_gap
        best_gap[better] = gap[better]
        best_t[better] = k * dt_sample
    i = int(np.argmin(best_gap))
    return float(best_gap[i]), grid[i][0], grid[i][1], float(best_t[i])
