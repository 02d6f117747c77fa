"""Grid integration of the Dekker-form master equation for rho(x, y, t).

The density matrix is stored on centre/relative coordinates R = (x+y)/2,
r = x - y (unit Jacobian), where the equation reads

    d rho/dt = (i hbar/M) d_R d_r rho - 2 gamma r d_r rho
               + (2i/hbar) D_pq r d_R rho + D_qq d_R^2 rho - (D_pp/hbar^2) r^2 rho.

Each axis has its own spacing: the diagonal (R) grows with diffusion while the
coherence length (r) shrinks with decoherence, and a square (x, y) lattice
would have to resolve both scales at once. Hermiticity is
rho(R, -r) = conj(rho(R, r)); momentum moments are r-derivatives at r = 0.

Spatial derivatives are 4th-order central differences, 2nd-order on the ring
next to the boundary; the outer ring is held at zero (Dirichlet). Time stepping
is classic explicit RK4.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .bath import BathSpec, DomainError, NumericalError
from .coefficients import DiffusionSet

# max |symbol| of the 4th-order first- and second-derivative stencils
_C1 = 1.3722
_C2 = 16.0 / 3.0


@dataclass(frozen=True)
class DensityGrid:
    data: np.ndarray  # (n_R, n_r) complex, axis 0 = R, axis 1 = r
    half_width_R: float
    half_width_r: float
    t: float = 0.0

    def __post_init__(self):
        nR, nr = self.data.shape
        if nr % 2 == 0:
            raise DomainError("relative axis needs an odd point count (r = 0 is a node)")
        if nR < 9 or nr < 9:
            raise DomainError("need at least 9 points per axis")

    @property
    def shape(self):
        return self.data.shape

    @property
    def h_R(self):
        return 2 * self.half_width_R / (self.data.shape[0] - 1)

    @property
    def h_r(self):
        return 2 * self.half_width_r / (self.data.shape[1] - 1)

    @property
    def R(self):
        return np.linspace(-self.half_width_R, self.half_width_R, self.data.shape[0])

    @property
    def r(self):
        return np.linspace(-self.half_width_r, self.half_width_r, self.data.shape[1])

    @property
    def j0(self):
        return self.data.shape[1] // 2

    def xy(self):
        """Original coordinates x = R + r/2, y = R - r/2 of every node."""
        Rg, rg = np.meshgrid(self.R, self.r, indexing="ij")
        return Rg + rg / 2, Rg - rg / 2

    def trace(self) -> complex:
        return self.h_R * self.data[:, self.j0].sum()

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - np.conj(self.data[:, ::-1]))))

    def with_data(self, data, t=None) -> "DensityGrid":
        return replace(self, data=data, t=self.t if t is None else t)



def gaussian_state(mq, mp, sqq, spp, sqp, n_R, half_width_R, n_r, half_width_r,
                   hbar=1.0, edge_tol=1e-8) -> DensityGrid:
    """Gaussian density matrix with the given first and second moments.

    rho(R, r) = N(R; mq, sqq) exp(i mu_p(R) r / hbar - v r^2 / (2 hbar^2)), with
    mu_p(R) = mp + sqp (R - mq)/sqq and v = spp - sqp^2/sqq. Mixed states are
    allowed (sqq*spp - sqp^2 >= hbar^2/4 for physical ones).
    """
    if not (sqq > 0 and spp > 0):
        raise DomainError("variances must be positive")
    v = spp - sqp**2 / sqq
    if v <= 0:
        raise DomainError("covariance matrix is not positive definite")
    k = math.sqrt(2 * math.log(1 / edge_tol))
    if abs(mq) + k * math.sqrt(sqq) > half_width_R:
        raise DomainError(
            f"centre axis too short: need half width >= {abs(mq) + k * math.sqrt(sqq):.3g}")
    if k * hbar / math.sqrt(v) > half_width_r:
        raise DomainError(
            f"relative axis too short: need half width >= {k * hbar / math.sqrt(v):.3g}")
    R = np.linspace(-half_width_R, half_width_R, n_R)[:, None]
    r = np.linspace(-half_width_r, half_width_r, n_r)[None, :]
    mu_p = mp + sqp * (R - mq) / sqq
    data = np.exp(-((R - mq) ** 2) / (2 * sqq) + 1j * mu_p * r / hbar - v * r**2 / (2 * hbar**2))
    data[0, :] = data[-1, :] = data[:, 0] = data[:, -1] = 0
    grid = DensityGrid(data, half_width_R, half_width_r)
    return grid.with_data(data / grid.trace().real)


def gaussian_pure_state(q0, p0, sigma0, n_R, half_width_R, n_r=None, half_width_r=None,
                        hbar=1.0) -> DensityGrid:
    """psi(x) psi*(y) for a minimum-uncertainty packet of width sigma0."""
    if sigma0 <= 0:
        raise DomainError("sigma0 must be positive")
    n_r = n_R if n_r is None else n_r
    half_width_r = 2 * half_width_R if half_width_r is None else half_width_r
    return gaussian_state(q0, p0, sigma0**2, hbar**2 / (4 * sigma0**2), 0.0,
                          n_R, half_width_R, n_r, half_width_r, hbar=hbar)


# ---------------------------------------------------------------- stencils

def d1(f, h, axis):
    """First derivative; zero on the outer ring."""
    f = np.moveaxis(f, axis, 0)
    out = np.zeros_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    out[1] = (f[2] - f[0]) / (2 * h)
    out[-2] = (f[-1] - f[-3]) / (2 * h)
    return np.moveaxis(out, 0, axis)


def d2(f, h, axis):
    """Second derivative; zero on the outer ring."""
    f = np.moveaxis(f, axis, 0)
    out = np.zeros_like(f)
    out[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
    out[1] = (f[2] - 2 * f[1] + f[0]) / (h * h)
    out[-2] = (f[-1] - 2 * f[-2] + f[-3]) / (h * h)
    return np.moveaxis(out, 0, axis)


def _coefficients(d: DiffusionSet, bath: BathSpec):
    return bath.hbar, bath.M, d.gamma, d.D_qq, d.D_pq, d.D_pp


def me_rhs_reference(rho: DensityGrid, d: DiffusionSet, bath: BathSpec) -> np.ndarray:
    """Plain-numpy right-hand side; the fused kernel in :func:`me_rhs` must match it."""
    hbar, M, g, Dqq, Dpq, Dpp = _coefficients(d, bath)
    f = rho.data
    hR, hr = rho.h_R, rho.h_r
    r = rho.r[None, :]
    f_r = d1(f, hr, 1)
    out = (1j * hbar / M) * d1(f_r, hR, 0)
    out -= 2 * g * r * f_r
    out += (2j / hbar) * Dpq * r * d1(f, hR, 0)
    out += Dqq * d2(f, hR, 0)
    out -= (Dpp / hbar**2) * (r * r) * f
    out[0, :] = out[-1, :] = out[:, 0] = out[:, -1] = 0
    return out


@njit(cache=True)
def _d1_line(f, out, h):
    n = f.shape[0]
    out[0] = 0
    out[n - 1] = 0
    out[1] = (f[2] - f[0]) / (2 * h)
    out[n - 2] = (f[n - 1] - f[n - 3]) / (2 * h)
    c = 1.0 / (12 * h)
    for k in range(2, n - 2):
        out[k] = (f[k - 2] - 8 * f[k - 1] + 8 * f[k + 1] - f[k + 2]) * c


@njit(cache=True)
def _rhs_kernel(f, fr, out, hR, hr, r, c_kin, c_adv, c_pq, c_qq, c_pp):
    nR, nr = f.shape
    for i in range(nR):
        _d1_line(f[i], fr[i], hr)
    out[0, :] = 0
    out[nR - 1, :] = 0
    a1 = 1.0 / (12 * hR)
    a2 = 1.0 / (12 * hR * hR)
    for i in range(1, nR - 1):
        edge = i == 1 or i == nR - 2
        for j in range(1, nr - 1):
            if edge:
                fRR = (f[i + 1, j] - 2 * f[i, j] + f[i - 1, j]) / (hR * hR)
                fR = (f[i + 1, j] - f[i - 1, j]) / (2 * hR)
                frR = (fr[i + 1, j] - fr[i - 1, j]) / (2 * hR)
            else:
                fRR = (-f[i - 2, j] + 16 * f[i - 1, j] - 30 * f[i, j]
                       + 16 * f[i + 1, j] - f[i + 2, j]) * a2
                fR = (f[i - 2, j] - 8 * f[i - 1, j] + 8 * f[i + 1, j] - f[i + 2, j]) * a1
                frR = (fr[i - 2, j] - 8 * fr[i - 1, j] + 8 * fr[i + 1, j] - fr[i + 2, j]) * a1
            rj = r[j]
            out[i, j] = (c_kin * frR - c_adv * rj * fr[i, j] + c_pq * rj * fR
                         + c_qq * fRR - c_pp * rj * rj * f[i, j])
        out[i, 0] = 0
        out[i, nr - 1] = 0


def me_rhs(rho: DensityGrid, d: DiffusionSet, bath: BathSpec) -> np.ndarray:
    """Discretized right-hand side of the master equation (damping rate d.gamma)."""
    hbar, M, g, Dqq, Dpq, Dpp = _coefficients(d, bath)
    f = np.ascontiguousarray(rho.data, dtype=np.complex128)
    out = np.empty_like(f)
    fr = np.empty_like(f)
    _rhs_kernel(f, fr, out, rho.h_R, rho.h_r, rho.r, 1j * hbar / M, 2 * g,
                2j * Dpq / hbar, Dqq, Dpp / hbar**2)
    return out


def stable_dt(rho: DensityGrid, d: DiffusionSet, bath: BathSpec, cfl=1.0) -> float:
    """cfl / (sum of the spectral radii of every term); RK4 is stable up to
    about 2.8 on both the real and imaginary axes."""
    hbar, M, g, Dqq, Dpq, Dpp = _coefficients(d, bath)
    hR, hr, Lr = rho.h_R, rho.h_r, rho.half_width_r
    lam = (hbar / M) * _C1**2 / (hR * hr)
    lam += 2 * g * Lr * _C1 / hr
    lam += 2 * abs(Dpq) * Lr * _C1 / (hbar * hR)
    lam += Dqq * _C2 / hR**2
    lam += Dpp * Lr**2 / hbar**2
    return cfl / lam


@dataclass
class StepDiagnostics:
    hermiticity_drift: float = 0.0  # max pre-symmetrization asymmetry seen
    trace_drift: float = 0.0  # accumulated |change of trace|
    steps: int = 0


def symmetrize(data):
    return 0.5 * (data + np.conj(data[:, ::-1]))


@njit(cache=True)
def _rk4_symmetrized(f, dt, hR, hr, r, c_kin, c_adv, c_pq, c_qq, c_pp):
    """RK4 update followed by rho <- (rho + conj(flip_r(rho)))/2.
    Returns (new, max pre-symmetrization asymmetry, all finite)."""
    nR, nr = f.shape
    fr = np.empty_like(f)
    k = np.empty_like(f)
    acc = f.copy()
    stage = np.empty_like(f)
    weights = (1.0, 2.0, 2.0, 1.0)
    shifts = (0.5, 0.5, 1.0, 0.0)
    src = f
    for s in range(4):
        _rhs_kernel(src, fr, k, hR, hr, r, c_kin, c_adv, c_pq, c_qq, c_pp)
        w = weights[s] * dt / 6.0
        sh = shifts[s] * dt
        for i in range(nR):
            for j in range(nr):
                acc[i, j] += w * k[i, j]
                stage[i, j] = f[i, j] + sh * k[i, j]
        src = stage
    asym = 0.0
    finite = True
    out = np.empty_like(f)
    for i in range(nR):
        for j in range(nr):
            a = acc[i, j]
            b = acc[i, nr - 1 - j].conjugate()
            dev = abs(a - b)
            if dev > asym:
                asym = dev
            if not (np.isfinite(a.real) and np.isfinite(a.imag)):
                finite = False
            out[i, j] = 0.5 * (a + b)
    return out, asym, finite


def _params(rho: DensityGrid, d: DiffusionSet, bath: BathSpec):
    hbar, M, g, Dqq, Dpq, Dpp = _coefficients(d, bath)
    return (rho.h_R, rho.h_r, rho.r, 1j * hbar / M, 2.0 * g, 2j * Dpq / hbar, float(Dqq),
            Dpp / hbar**2)


def step(rho: DensityGrid, d: DiffusionSet, bath: BathSpec, dt,
         diagnostics: StepDiagnostics | None = None) -> DensityGrid:
    """One classic RK4 step followed by Hermitian symmetrization.

    Raises NumericalError (with ``last_good`` attached) on NaN/Inf.
    """
    if dt == 0:
        return rho
    f0 = np.ascontiguousarray(rho.data, dtype=np.complex128)
    new, asym, finite = _rk4_symmetrized(f0, float(dt), *_params(rho, d, bath))
    if not finite:
        err = NumericalError(f"non-finite density matrix at t = {rho.t + dt:.6g}")
        err.last_good = rho
        raise err
    out = rho.with_data(new, t=rho.t + dt)
    if diagnostics is not None:
        diagnostics.hermiticity_drift = max(diagnostics.hermiticity_drift, asym)
        diagnostics.trace_drift += abs(out.trace() - rho.trace())
        diagnostics.steps += 1
    return out


def step_reference(rho: DensityGrid, d: DiffusionSet, bath: BathSpec, dt) -> DensityGrid:
    """Numpy RK4 step on :func:`me_rhs_reference` (for cross-checking)."""
    def F(x):
        return me_rhs_reference(rho.with_data(x), d, bath)

    f0 = rho.data
    k1 = F(f0)
    k2 = F(f0 + 0.5 * dt * k1)
    k3 = F(f0 + 0.5 * dt * k2)
    k4 = F(f0 + dt * k3)
    new = f0 + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho.with_data(symmetrize(new), t=rho.t + dt)


@dataclass(frozen=True)
class Observables:
    t: float
    trace: float
    mean_q: float
    mean_p: float
    sigma_qq: float
    sigma_pp: float
    sigma_qp: float
    purity: float
    hermiticity: float
    min_diagonal: float
    boundary_warning: str | None = None

    @property
    def uncertainty_product(self):
        return self.sigma_qq * self.sigma_pp - self.sigma_qp**2


def observables(rho: DensityGrid, hbar=1.0, ring=0.05, contamination=1e-6) -> Observables:
    """Moments from the diagonal and from r-derivatives at r = 0
    (<p^k> = int dR [(-i hbar d_r)^k rho]_{r=0}); 4th-order stencils."""
    f = rho.data
    j0, hR, hr = rho.j0, rho.h_R, rho.h_r
    R = rho.R
    diag = f[:, j0]
    c = f[:, j0 - 2: j0 + 3]
    dr1 = (c[:, 0] - 8 * c[:, 1] + 8 * c[:, 3] - c[:, 4]) / (12 * hr)
    dr2 = (-c[:, 0] + 16 * c[:, 1] - 30 * c[:, 2] + 16 * c[:, 3] - c[:, 4]) / (12 * hr * hr)
    tr = hR * diag.sum()
    w = hR / tr
    mq = (w * (R * diag).sum()).real
    q2 = (w * (R * R * diag).sum()).real
    mp = (w * (-1j * hbar) * dr1.sum()).real
    p2 = (w * (-hbar**2) * dr2.sum()).real
    qp = (w * (-1j * hbar) * (R * dr1).sum()).real
    purity = float(hR * hr * np.sum(np.abs(f) ** 2))

    warning = None
    dmag = np.abs(diag)
    edge_R = np.abs(R) > (1 - ring) * rho.half_width_R
    frac = dmag[edge_R].sum() / dmag.sum()
    edge_r = np.abs(rho.r) > (1 - ring) * rho.half_width_r
    rfrac = np.abs(f[:, edge_r]).max() / np.abs(f).max()
    if frac >= contamination or rfrac >= contamination:
        warning = f"boundary contamination: diagonal {frac:.2e}, off-diagonal {rfrac:.2e}"
    return Observables(
        t=rho.t, trace=float(tr.real), mean_q=float(mq), mean_p=float(mp),
        sigma_qq=float(q2 - mq * mq), sigma_pp=float(p2 - mp * mp),
        sigma_qp=float(qp - mq * mp), purity=purity,
        hermiticity=rho.hermiticity_error(), min_diagonal=float(diag.real.min()),
        boundary_warning=warning,
    )


@dataclass
class GridRun:
    observables: list
    final: DensityGrid
    diagnostics: StepDiagnostics
    dt: float
    snapshots: list = field(default_factory=list)


def evolve(rho: DensityGrid, d: DiffusionSet, bath: BathSpec, t_end, dt=None, cfl=1.0,
           sample_every=None, snapshot_times=(), max_trace_drift=1e-2) -> GridRun:
    """Integrate to ``t_end`` (hit exactly), collecting observables every
    ``sample_every`` time units.

    An accumulated trace drift above ``max_trace_drift`` is treated as an
    instability (NumericalError with ``last_good``).
    """
    dt_max = stable_dt(rho, d, bath, cfl) if dt is None else dt
    n = max(1, int(math.ceil(t_end / dt_max - 1e-12)))
    h = t_end / n
    stride = 1 if sample_every is None else max(1, int(round(sample_every / h)))
    snap_steps = {int(round(ts / h)) for ts in snapshot_times}
    diag = StepDiagnostics()
    obs = [observables(rho, bath.hbar)]
    snaps = [rho] if 0 in snap_steps else []
    for k in range(1, n + 1):
        prev = rho
        rho = step(rho, d, bath, h, diag)
        if diag.trace_drift > max_trace_drift:
            err = NumericalError(
                f"trace drifted by {diag.trace_drift:.3g} at t = {rho.t:.6g}; "
                "the time step is probably unstable (lower cfl)", estimate=diag.trace_drift)
            err.last_good = prev
            raise err
        if k % stride == 0 or k == n:
            obs.append(observables(rho, bath.hbar))
        if k in snap_steps:
            snaps.append(rho)
    return GridRun(obs, rho, diag, h, snaps)


def auto_grid(m0, d: DiffusionSet, bath: BathSpec, t_end, n_R=257, n_r=257, margin=7.0):
    """Half widths that contain the Gaussian evolved by the moment ODE over
    [0, t_end] with ``margin`` standard deviations to spare on both axes."""
    from .moments import evolve_exact

    times = np.linspace(0, t_end, 101)
    traj = evolve_exact(m0, d, bath, times)
    mq, sqq, spp, sqp = traj.y[:, 0], traj.y[:, 2], traj.y[:, 3], traj.y[:, 4]
    half_R = float(np.max(np.abs(mq) + margin * np.sqrt(sqq)))
    v = spp - sqp**2 / sqq
    half_r = float(np.max(margin * bath.hbar / np.sqrt(v)))
    return half_R, half_r


# ---------------------------------------------------------------- export

def write_csv(rho: DensityGrid, path):
    x, y = rho.xy()
    with open(path, "w") as fh:
        fh.write(f"# t = {rho.t!r}\n")
        fh.write(f"# shape = {rho.shape[0]}x{rho.shape[1]} (centre R, relative r)\n")
        fh.write("x,y,re_rho,im_rho\n")
        for xi, yi, v in zip(x.ravel(), y.ravel(), rho.data.ravel()):
            fh.write(f"{xi:.17g},{yi:.17g},{v.real:.17g},{v.imag:.17g}\n")


_MAGIC = b"QBMG"


def write_binary(rho: DensityGrid, path):
    """Header: magic, n_R, n_r (uint32), half widths and t (float64), all
    little-endian; then row-major (re, im) float64 pairs."""
    nR, nr = rho.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II3d", nR, nr, rho.half_width_R, rho.half_width_r, rho.t))
        fh.write(np.ascontiguousarray(rho.data, dtype="<c16").tobytes())


def read_binary(path) -> DensityGrid:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a density-grid dump")
        nR, nr, LR, Lr, t = struct.unpack("<II3d", fh.read(struct.calcsize("<II3d")))
        data = np.frombuffer(fh.read(), dtype="<c16").reshape(nR, nr).astype(complex)
    return DensityGrid(data, LR, Lr, t)
