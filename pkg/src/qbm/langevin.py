"""Classical Langevin dynamics of a free Brownian particle.

    dq = p/M dt,   dp = -gamma_cl p dt + sqrt(Gamma) dW,   Gamma = 2 M gamma_cl kB T

integrated by Euler-Maruyama over an ensemble of independent trajectories.
The noise strength is always derived from (gamma_cl, T, M); there is no way to
pass Gamma directly.

The master equation relaxes <p> at rate 2*gamma, so the classical model is
matched with gamma_cl = 2*gamma (see :func:`correspondence_map`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bath import BathSpec, DomainError

CHUNK = 10_000  # trajectories per independent random stream


@dataclass(frozen=True)
class LangevinConfig:
    gamma_cl: float
    T: float
    M: float = 1.0
    kB: float = 1.0
    dt: float = 0.005
    n_steps: int = 4000
    n_traj: int = 100_000
    seed: int = 20240917
    p0: float = 0.0
    q0: float = 0.0
    sample_every: int = 10
    warning: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.gamma_cl <= 0 or self.T <= 0 or self.M <= 0:
            raise DomainError("gamma_cl, T and M must be positive")
        if self.dt * self.gamma_cl > 0.01 + 1e-12:
            raise DomainError(f"dt*gamma_cl = {self.dt * self.gamma_cl:.3g} exceeds 0.01")
        if self.n_traj < 2 or self.n_steps < 1:
            raise DomainError("need n_traj >= 2 and n_steps >= 1")

    @property
    def Gamma(self) -> float:
        return 2 * self.M * self.gamma_cl * self.kB * self.T

    @property
    def t_end(self) -> float:
        return self.n_steps * self.dt


@dataclass
class LangevinResult:
    t: np.ndarray
    mean_p: np.ndarray
    var_p: np.ndarray
    var_q: np.ndarray
    mean_p_err: np.ndarray
    var_p_err: np.ndarray
    var_q_err: np.ndarray
    seed: int
    # per-trajectory time averages of p^2 over the second half, for a
    # stationary estimate with an honest error bar
    p2_time_avg: np.ndarray = field(repr=False, default=None)

    def stationary_p2(self):
        x = self.p2_time_avg
        return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))

    def msd_slope(self, t_min=None):
        """Least-squares slope of var_q over t >= t_min (default: second half)."""
        t_min = self.t[-1] / 2 if t_min is None else t_min
        sel = self.t >= t_min
        slope, _ = np.polyfit(self.t[sel], self.var_q[sel], 1)
        return float(slope)

    def columns(self):
        return {"t": self.t, "mean_p": self.mean_p, "var_p": self.var_p, "var_q": self.var_q,
                "mean_p_stderr": self.mean_p_err, "var_p_stderr": self.var_p_err,
                "var_q_stderr": self.var_q_err}


def _chunk_streams(seed, n_traj):
    n_chunks = -(-n_traj // CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(CHUNK, n_traj - i * CHUNK) for i in range(n_chunks)]
    return [(np.random.Generator(np.random.Philox(c)), s) for c, s in zip(children, sizes)]


def simulate(cfg: LangevinConfig, noise_substeps: int = 1) -> LangevinResult:
    """Euler-Maruyama ensemble; reproducible from ``cfg.seed``.

    Each step draws ``noise_substeps`` standard normals per trajectory and uses
    their normalized sum, so a run with (dt, substeps=2) consumes exactly the
    Brownian path of a run with (dt/2, substeps=1): coupled paths for
    weak-convergence checks.
    """
    n_samples = cfg.n_steps // cfg.sample_every + 1
    sums = {k: np.zeros(n_samples) for k in ("p", "p2", "p4", "q", "q2", "q4")}
    p2_avg = np.empty(cfg.n_traj)
    half = cfg.n_steps // 2
    sq = math.sqrt(cfg.Gamma * cfg.dt / noise_substeps)
    decay = 1 - cfg.gamma_cl * cfg.dt
    start = 0
    for rng, size in _chunk_streams(cfg.seed, cfg.n_traj):
        p = np.full(size, cfg.p0, dtype=float)
        q = np.full(size, cfg.q0, dtype=float)
        acc = np.zeros(size)
        _accumulate(sums, 0, p, q)
        for k in range(1, cfg.n_steps + 1):
            xi = rng.standard_normal((noise_substeps, size)).sum(axis=0)
            q += p * (cfg.dt / cfg.M)
            p *= decay
            p += sq * xi
            if k > half:
                acc += p * p
            if k % cfg.sample_every == 0:
                _accumulate(sums, k // cfg.sample_every, p, q)
        p2_avg[start:start + size] = acc / (cfg.n_steps - half)
        start += size
    n = cfg.n_traj
    t = np.arange(n_samples) * cfg.sample_every * cfg.dt
    mp = sums["p"] / n
    mq = sums["q"] / n
    vp = sums["p2"] / n - mp**2
    vq = sums["q2"] / n - mq**2
    # raw fourth moments suffice for the error bars (means are small vs spread)
    vp_err = np.sqrt(np.maximum(sums["p4"] / n - (sums["p2"] / n) ** 2, 0) / n)
    vq_err = np.sqrt(np.maximum(sums["q4"] / n - (sums["q2"] / n) ** 2, 0) / n)
    return LangevinResult(t, mp, vp, vq, np.sqrt(vp / n), vp_err, vq_err, cfg.seed, p2_avg)


def _accumulate(sums, i, p, q):
    p2 = p * p
    q2 = q * q
    sums["p"][i] += p.sum()
    sums["p2"][i] += p2.sum()
    sums["p4"][i] += (p2 * p2).sum()
    sums["q"][i] += q.sum()
    sums["q2"][i] += q2.sum()
    sums["q4"][i] += (q2 * q2).sum()


def correspondence_map(bath: BathSpec, dt_gamma=0.005, t_end_gamma=20.0, **kwargs) -> LangevinConfig:
    """Classical configuration matching the master equation at leading order
    in 1/theta: gamma_cl = 2 gamma, same T and M."""
    gamma_cl = 2 * bath.gamma
    warning = None
    if bath.theta < 50:
        warning = f"theta = {bath.theta:.3g} < 50: quantum corrections not negligible"
        warnings.warn(warning, stacklevel=2)
    dt = dt_gamma / gamma_cl
    n_steps = int(round(t_end_gamma / (gamma_cl * dt)))
    return LangevinConfig(gamma_cl=gamma_cl, T=bath.T, M=bath.M, kB=bath.kB, dt=dt,
                          n_steps=n_steps, warning=warning, **kwargs)
