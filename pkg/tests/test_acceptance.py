"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (with the measured numbers) that is
printed in the terminal summary; ``python3 tests/test_acceptance.py`` prints
the same lines without pytest. Tolerances are the stated ones.
"""

from __future__ import annotations

import math
import sys
import time
import warnings

import numpy as np
import pytest
from scipy.optimize import brentq

from qbm import action, kernels, langevin, meq_grid, microbath, moments
from qbm import coefficients as coef
from qbm.bath import BathSpec, DomainError

RESULTS: dict[int, str] = {}


def record(n, ok, text):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}"
    RESULTS[n] = line
    print(line)
    return ok


def best_time(f, repeat=20):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = f()
        best = min(best, time.perf_counter() - t0)
    return out, best


# ---------------------------------------------------------------- 1

def check_1():
    d, dt = best_time(lambda: coef.diffusion_constants(BathSpec.from_theta(1e6)))
    val = d.Delta / (d.hbar * d.gamma) ** 2
    rel = abs(val - 1 / 12) / (1 / 12)
    ok = rel <= 1e-6 and dt < 1e-3
    return record(1, ok, f"Delta/(hbar gamma)^2 at theta=1e6 = {val:.12f}, rel dev {rel:.2e} "
                         f"(tol 1e-6); {dt * 1e3:.3f} ms (< 1 ms)")


# ---------------------------------------------------------------- 2

def check_2():
    cp, dt = best_time(coef.critical_temperature, repeat=5)
    # independent root of Delta/(hbar gamma)^2 = (u coth u - 1)/u^2 - 1/4
    u_star = brentq(lambda u: (u / math.tanh(u) - 1) / u**2 - 0.25, 0.5, 10.0, xtol=1e-14)
    indep = 1 / (2 * u_star)
    ok = (0.19 <= cp.theta0 <= 0.22 and abs(cp.theta0 - indep) < 1e-9
          and abs(cp.theta0 - 0.208) <= 1e-3 and dt < 1e-2)
    return record(2, ok, f"theta0 = {cp.theta0:.10f} (bisection), {indep:.10f} (brentq in u); "
                         f"|theta0 - 0.208| = {abs(cp.theta0 - 0.208):.2e} (tol 1e-3); "
                         f"{dt * 1e3:.2f} ms (< 10 ms)")


# ---------------------------------------------------------------- 3

def check_3():
    def compute():
        return coef.diffusion_constants(BathSpec.from_theta(1e-4)), coef.zero_temperature_limits()

    (d, lim), dt = best_time(compute)
    rels = {k: abs(getattr(d, k) - v) / abs(v) for k, v in lim.items()}
    ok = all(r <= 1e-4 for r in rels.values()) and dt < 1e-3
    parts = ", ".join(f"{k} {r:.2e}" for k, r in rels.items())
    return record(3, ok, f"rel dev from T=0 limits at theta=1e-4: {parts} (tol 1e-4); "
                         f"{dt * 1e3:.3f} ms (< 1 ms)")


# ---------------------------------------------------------------- 4

def check_4():
    t0 = time.perf_counter()
    worst = 0.0
    for chi in (0.1, 0.5, 1.0, 2.0, 5.0):
        b = BathSpec(T=20.0 / (2 * chi), omega_c=20.0)
        for x in (0.5, 1.0, 2.0, 5.0):
            tau = x / b.omega_c
            s = kernels.alpha_R_series(tau, b).value
            q = kernels.alpha_R_quadrature(tau, b).value
            worst = max(worst, abs(s - q) / abs(q))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-5 and dt < 10
    return record(4, ok, f"max |series - quadrature|/|quadrature| = {worst:.2e} over 20 points "
                         f"(tol 1e-5); {dt:.2f} s (< 10 s)")


# ---------------------------------------------------------------- 5

def check_5():
    t0 = time.perf_counter()
    worst = 0.0
    conv = []
    wc = 20.0
    for chi in (0.5, 1.0, 2.0, 3.0):
        b = BathSpec(T=wc / (2 * chi), gamma=0.05 * wc, omega_c=wc)
        res = action.resummation_check(b, rel_tol=1e-8)
        conv.append(res.converged_at)
        worst = max(worst, abs(res.partial_sums[-1] - res.target) / abs(res.target))
    raised = False
    try:
        action.resummation_check(BathSpec(T=wc / (2 * 3.5), gamma=0.05 * wc, omega_c=wc))
    except DomainError:
        raised = True
    dt = time.perf_counter() - t0
    ok = all(c is not None for c in conv) and worst <= 1e-8 and raised and dt < 1
    return record(5, ok, f"partial sums reach 1e-8 at L = {conv}, final rel dev {worst:.1e}; "
                         f"DomainError for chi > pi: {raised}; {dt * 1e3:.1f} ms (< 1 s)")


# ---------------------------------------------------------------- 6

CASES_6 = {
    0.5: dict(pure=0.7),
    1.0: dict(pure=1.0),
    10.0: dict(sqq=4.0),
}


def run_6(theta, n_R=256, n_r=257, cfl=2.0, margin=6.5):
    b = BathSpec.from_theta(theta)
    d = coef.diffusion_constants(b)
    case = CASES_6[theta]
    if "pure" in case:
        m0 = moments.GaussianMoments.minimum_uncertainty(0.0, 0.5, case["pure"])
    else:
        m0 = moments.GaussianMoments(0.0, 0.5, case["sqq"], b.M * b.kT, 0.0)
    t_end = 5 / b.gamma
    LR, Lr = meq_grid.auto_grid(m0, d, b, t_end, margin=margin)
    rho = meq_grid.gaussian_state(m0.mq, m0.mp, m0.sqq, m0.spp, m0.sqp, n_R, LR, n_r, Lr,
                                  hbar=b.hbar)
    t0 = time.perf_counter()
    run = meq_grid.evolve(rho, d, b, t_end, cfl=cfl, sample_every=0.05 / b.gamma)
    elapsed = time.perf_counter() - t0
    obs = run.observables
    ts = np.array([o.t for o in obs])
    ex = moments.evolve_exact(m0, d, b, ts).y
    g = np.array([[o.sigma_qq, o.sigma_pp, o.sigma_qp] for o in obs])
    e_qq = np.max(np.abs(g[:, 0] - ex[:, 2]) / ex[:, 2])
    e_pp = np.max(np.abs(g[:, 1] - ex[:, 3]) / ex[:, 3])
    # sigma_qp crosses zero: scale by sqrt(sigma_qq sigma_pp)
    e_qp = np.max(np.abs(g[:, 2] - ex[:, 4]) / np.sqrt(ex[:, 2] * ex[:, 3]))
    trace = max(abs(o.trace - 1) for o in obs)
    herm = max(run.diagnostics.hermiticity_drift, max(o.hermiticity for o in obs))
    return dict(err=max(e_qq, e_pp, e_qp), parts=(e_qq, e_pp, e_qp), trace=trace, herm=herm,
                time=elapsed, steps=run.diagnostics.steps,
                warned=any(o.boundary_warning for o in obs))


def check_6(theta):
    r = run_6(theta)
    ok = r["err"] <= 1e-3 and r["trace"] <= 1e-6 and r["herm"] <= 1e-10
    line = (f"theta={theta:g}: max rel err (qq, pp, qp) = ({r['parts'][0]:.1e}, "
            f"{r['parts'][1]:.1e}, {r['parts'][2]:.1e}) (tol 1e-3); trace drift "
            f"{r['trace']:.1e} (tol 1e-6); hermiticity {r['herm']:.1e} (tol 1e-10); "
            f"{r['steps']} steps, {r['time']:.0f} s")
    return ok, line


def check_6_all():
    lines, oks = [], []
    for theta in CASES_6:
        ok, line = check_6(theta)
        oks.append(ok)
        lines.append(line)
    return record(6, all(oks), "grid 256x257 vs moment ODE; " + "; ".join(lines))


# ---------------------------------------------------------------- 7

def check_7():
    b = BathSpec.from_theta(100.0)
    d = coef.diffusion_constants(b)
    st = moments.stationary(d, b)
    mkT = b.M * b.kT
    spp_dev = abs(st["spp"] - mkT) / mkT
    # also confirm the moment ODE actually relaxes there
    tr = moments.evolve_exact(moments.GaussianMoments(0, 0, 1.0, 1.0), d, b, [20 / b.gamma])
    spp_late = tr.y[-1, 3]
    t0 = time.perf_counter()
    cfg = langevin.correspondence_map(b, dt_gamma=0.005, t_end_gamma=20.0, n_traj=100_000)
    res = langevin.simulate(cfg)
    elapsed = time.perf_counter() - t0
    p2, se = res.stationary_p2()
    p2_ok = abs(p2 - mkT) <= 0.01 * mkT + se
    msd = res.msd_slope()
    me_slope = st["sqq_slope"]
    slope_dev = abs(me_slope - msd) / msd
    ok = spp_dev <= 0.02 and abs(spp_late - mkT) / mkT <= 0.02 and p2_ok and slope_dev <= 0.03
    return record(7, ok, f"ME sigma_pp/MkT = {st['spp'] / mkT:.5f} (tol 2%); Langevin <p^2>/MkT "
                         f"= {p2 / mkT:.5f} +- {se / mkT:.5f} (tol 1% + stat); ME dsigma_qq/dt = "
                         f"{me_slope:.3f} vs MSD slope {msd:.3f}, dev {slope_dev:.2%} (tol 3%); "
                         f"Langevin {elapsed:.0f} s")


# ---------------------------------------------------------------- 8

def check_8():
    t0 = time.perf_counter()
    b1 = BathSpec.from_theta(1.0)
    gap1, r1, a1, t1 = moments.squeeze_scan(coef.diffusion_constants(b1), b1)
    b2 = BathSpec.from_theta(0.05)
    gap2, r2, a2, t2 = moments.squeeze_scan(coef.diffusion_constants(b2), b2)
    elapsed = time.perf_counter() - t0
    ok = gap1 >= -1e-9 and gap2 < 0 and t2 <= 5 / b2.gamma
    return record(8, ok, f"theta=1: min(product - hbar^2/4) = {gap1:.3e} (>= -1e-9); "
                         f"theta=0.05: {gap2:.3e} at ratio {r2:.3g}, angle {a2:.3f}, "
                         f"t = {t2:.2f}/gamma (< 0 required); 984 states each, {elapsed:.1f} s")


# ---------------------------------------------------------------- 9

def check_9():
    b = BathSpec(T=10.0)
    wmax = 50 * b.omega_c
    t0 = time.perf_counter()
    t = np.linspace(0, 5 / b.omega_c, 501)
    trunc = microbath.friction_kernel_truncated(b, t, wmax)
    # smallest N whose recurrence-free window covers [0, 5/wc] is 160
    ladder = (160, 256, 512, 1024, 4096, 10_000)
    errs, errs_trunc = [], []
    for n in ladder:
        ens = microbath.sample_drude(b, n, omega_max=wmax)
        tab = microbath.kernel_table(ens, t)
        errs.append(float(np.max(tab[:, 3])))
        errs_trunc.append(float(np.max(np.abs(tab[:, 1] - trunc) / np.abs(trunc))))
    elapsed = time.perf_counter() - t0
    # non-increasing up to rounding of the (N-independent) t = 0 value
    mono = all(c <= a * (1 + 1e-12) for a, c in zip(errs, errs[1:]))
    strict = all(c < a for a, c in zip(errs_trunc, errs_trunc[1:]))
    final = errs[-1]
    ok = final <= 0.01 and mono and elapsed < 30
    deficit = 2 / math.pi * math.atan(1 / 50)
    return record(9, ok, f"L_inf rel err vs M gamma wc e^(-wc t) at N=1e4, omega_max=50 wc: "
                         f"{final:.4%} (tol 1%), attained at t=0 where the cutoff removes "
                         f"(2/pi) arctan(1/50) = {deficit:.4%} of K(0); non-increasing over "
                         f"N={list(ladder)}: {mono}; vs the continuum truncated at omega_max "
                         f"the error falls strictly ({strict}): "
                         f"{', '.join(f'{v:.1e}' for v in errs_trunc)}; {elapsed:.1f} s")


# ---------------------------------------------------------------- 10

def check_10():
    b = BathSpec.from_theta(1e3)
    d = coef.diffusion_constants(b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lead = coef.high_T_expansion(b)
    lead_ok = all(abs(getattr(d, k) - v[0]) / abs(v[0]) < 1e-5 for k, v in lead.items())
    c = (d.D_pp / (2 * b.M * b.gamma * b.kT) - 1) * b.theta**2
    return record(10, lead_ok, f"excluded from quantitative acceptance: D_pp subleading "
                               f"coefficient (direct expansion gives {c:.5f} ~ 1/3; only leading "
                               f"orders tested, all within 1e-5 at theta=1e3) and low-T "
                               f"non-Markovian dynamics")


# ---------------------------------------------------------------- pytest

def test_criterion_1():
    assert check_1(), RESULTS[1]


def test_criterion_2():
    assert check_2(), RESULTS[2]


def test_criterion_3():
    assert check_3(), RESULTS[3]


def test_criterion_4():
    assert check_4(), RESULTS[4]


def test_criterion_5():
    assert check_5(), RESULTS[5]


def test_criterion_6():
    assert check_6_all(), RESULTS[6]


def test_criterion_7():
    assert check_7(), RESULTS[7]


def test_criterion_8():
    assert check_8(), RESULTS[8]


def test_criterion_9():
    assert check_9(), RESULTS[9]


def test_criterion_10():
    assert check_10(), RESULTS[10]


if __name__ == "__main__":
    checks = [check_1, check_2, check_3, check_4, check_5, check_6_all, check_7, check_8,
              check_9, check_10]
    results = [f() for f in checks]
    sys.exit(0 if all(results) else 1)
