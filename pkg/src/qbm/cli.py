"""Command-line interface.

    qbm coeffs --theta 1e6
    qbm sweep --theta-min 0.01 --theta-max 10 --n-points 200
    qbm critical-temp
    qbm kernel --chi 1 --method both --plot
    qbm evolve --mode grid --theta 1 --sigma0 1
    qbm langevin --theta 100
    qbm microbath --n-modes 10000

Every option can also come from a flat ``key = value`` file (``--config``);
command-line flags win. Each run writes ``manifest_<command>.txt`` (the
resolved configuration, itself a valid config file) next to its CSV outputs.
With ``--units si`` the physical constants must all be given explicitly;
theta is always k_B T / (hbar gamma).
Exit codes: 0 success, 2 domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from . import coefficients as coef
from . import io
from .bath import BathSpec, DomainError, NumericalError

COMMON_DEFAULTS = {
    "out": ".",
    "units": "natural",
    "hbar": 1.0,
    "kB": 1.0,
    "M": 1.0,
    "gamma": 1.0,
    "omega_c": 20.0,
    "plot": False,
}

DEFAULTS = {
    "coeffs": {"theta": None, "T": None},
    "sweep": {"theta_min": 0.01, "theta_max": 10.0, "n_points": 100, "linear": False},
    "critical-temp": {},
    "kernel": {"chi": 1.0, "tau_min": 0.5, "tau_max": 5.0, "n_tau": 10, "method": "both",
               "rel_tol": 1e-10},
    "evolve": {"mode": "moments", "theta": 1.0, "T": None, "q0": 0.0, "p0": 0.5,
               "sigma0": 1.0, "sqq": None, "spp": None, "sqp": 0.0, "t_end": None,
               "n": 257, "cfl": 2.0, "margin": 6.5, "sample_every": None,
               "snapshot_times": None},
    "langevin": {"theta": 100.0, "T": None, "gamma_cl": None, "n_traj": 100_000,
                 "dt_gamma": 0.005, "t_end_gamma": 20.0, "seed": 20240917, "p0": 0.0},
    "microbath": {"n_modes": 10_000, "omega_max": None, "scheme": "grid", "n_t": 101,
                  "t_max": None, "seed": 0},
}


def _flag(name):
    return "--" + name.replace("_", "-")


def build_parser():
    p = argparse.ArgumentParser(prog="qbm", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"qbm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key = value file; flags override it")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--units", choices=["natural", "si"])
        for k in ("hbar", "kB", "M", "gamma", "omega_c"):
            sp.add_argument(_flag(k), dest=k, type=float)
        sp.add_argument("--plot", action="store_const", const=True, default=None)
        return sp

    c = common(sub.add_parser("coeffs", help="diffusion constants and Delta at one temperature"))
    c.add_argument("--theta", type=float, help="kB T / (hbar gamma)")
    c.add_argument("--T", type=float)

    s = common(sub.add_parser("sweep", help="CSV of the constants over a theta range"))
    s.add_argument("--theta-min", type=float)
    s.add_argument("--theta-max", type=float)
    s.add_argument("--n-points", type=int)
    s.add_argument("--linear", action="store_const", const=True, default=None)

    common(sub.add_parser("critical-temp", help="temperature where Delta changes sign"))

    k = common(sub.add_parser("kernel", help="alpha_R(tau) by series and/or quadrature"))
    k.add_argument("--chi", type=float)
    k.add_argument("--tau-min", type=float, help="in units of 1/omega_c")
    k.add_argument("--tau-max", type=float, help="in units of 1/omega_c")
    k.add_argument("--n-tau", type=int)
    k.add_argument("--method", choices=["series", "quadrature", "both"])
    k.add_argument("--rel-tol", type=float)

    e = common(sub.add_parser("evolve", help="master-equation dynamics (grid or moments)"))
    e.add_argument("--mode", choices=["grid", "moments"])
    e.add_argument("--theta", type=float)
    e.add_argument("--T", type=float)
    for name in ("q0", "p0", "sigma0", "sqq", "spp", "sqp", "t_end", "cfl", "margin",
                 "sample_every"):
        e.add_argument(_flag(name), dest=name, type=float)
    e.add_argument("--n", type=int, help="grid points per axis")
    e.add_argument("--snapshot-times", type=str, help="comma-separated times")

    lg = common(sub.add_parser("langevin", help="classical Langevin ensemble"))
    lg.add_argument("--theta", type=float)
    lg.add_argument("--T", type=float)
    lg.add_argument("--gamma-cl", type=float, help="default 2*gamma")
    lg.add_argument("--n-traj", type=int)
    lg.add_argument("--dt-gamma", type=float, help="gamma_cl * dt")
    lg.add_argument("--t-end-gamma", type=float, help="gamma_cl * t_end")
    lg.add_argument("--seed", type=int)
    lg.add_argument("--p0", type=float)

    mb = common(sub.add_parser("microbath", help="discrete bath kernel vs continuum"))
    mb.add_argument("--n-modes", type=int)
    mb.add_argument("--omega-max", type=float, help="default 50 omega_c")
    mb.add_argument("--scheme", choices=["grid", "stratified"])
    mb.add_argument("--n-t", type=int)
    mb.add_argument("--t-max", type=float, help="default 5/omega_c")
    mb.add_argument("--seed", type=int)
    return p


def _coerce(value, like):
    if isinstance(value, str):
        if isinstance(like, bool) or value.lower() in ("true", "false"):
            return value.lower() in ("1", "true", "yes")
        if isinstance(like, int) and not isinstance(like, bool):
            return int(float(value))
        if value.lower() == "none":
            return None
        try:
            return float(value)
        except ValueError:
            return value
    return value


def resolve(args) -> dict:
    """defaults <- config file <- flags."""
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(DEFAULTS[args.command])
    if args.config:
        if not os.path.isfile(args.config):
            raise DomainError(f"config file not found: {args.config}")
        for key, value in io.read_config(args.config).items():
            if key in ("command", "qbm_version", "schema_version"):
                continue
            if key not in cfg:
                raise DomainError(f"unknown config key {key!r} for {args.command}")
            cfg[key] = _coerce(value, cfg[key])
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    if cfg["units"] == "si":
        given = {k for k, v in vars(args).items() if v is not None}
        if args.config:
            given |= set(io.read_config(args.config))
        missing = [k for k in ("hbar", "kB", "M", "gamma") if k not in given]
        if missing:
            raise DomainError(f"--units si needs explicit {', '.join(missing)}")
    return cfg


def _bath(cfg, theta=None, T=None) -> BathSpec:
    kw = {k: cfg[k] for k in ("M", "gamma", "omega_c", "hbar", "kB")}
    if T is not None:
        return BathSpec(T=T, **kw)
    if theta is None:
        raise DomainError("give --theta or --T")
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    return BathSpec.from_theta(theta, **kw)


def _manifest(command, cfg):
    m = {"command": command, "qbm_version": __version__}
    m.update({k: v for k, v in cfg.items() if k != "out"})
    return m


def _out(cfg, name):
    os.makedirs(cfg["out"], exist_ok=True)
    return os.path.join(cfg["out"], name)


def _finish(command, cfg):
    io.write_manifest(_out(cfg, f"manifest_{command}.txt"), _manifest(command, cfg))


# ------------------------------------------------------------------ commands

def cmd_coeffs(cfg):
    b = _bath(cfg, cfg["theta"], cfg["T"])
    d = coef.diffusion_constants(b)
    scale = (b.hbar * b.gamma) ** 2
    cols = {"theta": [b.theta], "T": [b.T], "D_qq": [d.D_qq], "D_pq": [d.D_pq],
            "D_pp": [d.D_pp], "Delta": [d.Delta], "Delta_over_hbar2gamma2": [d.Delta / scale]}
    print(",".join(cols))
    print(",".join(f"{v[0]:.10g}" for v in cols.values()))
    if cfg["out"] != ".":
        io.write_csv(_out(cfg, "coeffs.csv"), cols, _manifest("coeffs", cfg))
        _finish("coeffs", cfg)


def cmd_sweep(cfg):
    thetas = coef.theta_grid(cfg["theta_min"], cfg["theta_max"], int(cfg["n_points"]),
                             log=not cfg["linear"])
    rows = np.array(coef.sweep(thetas, cfg["M"], cfg["gamma"], cfg["hbar"], cfg["kB"]))
    cols = dict(zip(["theta", "T", "D_qq", "D_pq", "D_pp", "Delta"], rows.T))
    path = _out(cfg, "sweep.csv")
    io.write_csv(path, cols, _manifest("sweep", cfg))
    if cfg["plot"]:
        from .svgplot import line_plot
        line_plot(_out(cfg, "sweep.svg"), thetas,
                  {"Delta/(hbar gamma)^2": cols["Delta"] / (cfg["hbar"] * cfg["gamma"]) ** 2},
                  xlabel="log10 theta", ylabel="Delta", logx=not cfg["linear"])
    _finish("sweep", cfg)
    print(f"wrote {path} ({len(thetas)} rows)")


def cmd_critical_temp(cfg):
    cp = coef.critical_temperature(cfg["gamma"], cfg["hbar"], cfg["kB"], cfg["M"])
    print(f"theta0 = {cp.theta0:.10f}")
    print(f"T0 = {cp.T0:.10g}")
    print(f"u* = {cp.u_star:.10f}")
    if cfg["out"] != ".":
        io.write_csv(_out(cfg, "critical_temp.csv"),
                     {"theta0": [cp.theta0], "T0": [cp.T0], "u_star": [cp.u_star]},
                     _manifest("critical-temp", cfg))
        _finish("critical-temp", cfg)


def cmd_kernel(cfg):
    from . import kernels

    kw = {k: cfg[k] for k in ("M", "gamma", "omega_c", "hbar", "kB")}
    chi = cfg["chi"]
    if not chi > 0:
        raise DomainError("chi must be positive")
    T = kw["hbar"] * kw["omega_c"] / (2 * kw["kB"] * chi)
    b = BathSpec(T=T, **kw)
    x = np.linspace(cfg["tau_min"], cfg["tau_max"], int(cfg["n_tau"]))
    if np.any(x <= 0):
        raise DomainError("tau must be > 0")
    tau = x / b.omega_c
    cols = {"tau": tau, "tau_omega_c": x}
    if cfg["method"] in ("series", "both"):
        kernels.check_resonance(b.chi)
        cols["series"] = np.array([kernels.alpha_R_series(t, b).value for t in tau])
    if cfg["method"] in ("quadrature", "both"):
        cols["quadrature"] = np.array(
            [kernels.alpha_R_quadrature(t, b, rel_tol=cfg["rel_tol"]).value for t in tau])
    if cfg["method"] == "both":
        cols["rel_diff"] = np.abs(cols["series"] - cols["quadrature"]) / np.abs(cols["quadrature"])
    cols["alpha_I"] = np.array([kernels.alpha_I(t, b).value for t in tau])
    path = _out(cfg, "kernel.csv")
    io.write_csv(path, cols, _manifest("kernel", cfg))
    if cfg["plot"]:
        from .svgplot import line_plot
        series = {k: cols[k] for k in ("series", "quadrature") if k in cols}
        line_plot(_out(cfg, "kernel.svg"), x, series, xlabel="omega_c tau",
                  ylabel="alpha_R", title=f"chi = {chi:g}")
    _finish("kernel", cfg)
    if "rel_diff" in cols:
        print(f"max relative difference series vs quadrature: {cols['rel_diff'].max():.3e}")
    print(f"wrote {path}")


def cmd_evolve(cfg):
    from . import meq_grid, moments

    b = _bath(cfg, cfg["theta"], cfg["T"])
    d = coef.diffusion_constants(b)
    t_end = 5 / b.gamma if cfg["t_end"] is None else cfg["t_end"]
    every = 0.05 / b.gamma if cfg["sample_every"] is None else cfg["sample_every"]
    if cfg["sqq"] is not None or cfg["spp"] is not None:
        if cfg["sqq"] is None or cfg["spp"] is None:
            raise DomainError("mixed initial state needs both --sqq and --spp")
        m0 = moments.GaussianMoments(cfg["q0"], cfg["p0"], cfg["sqq"], cfg["spp"], cfg["sqp"])
    else:
        m0 = moments.GaussianMoments.minimum_uncertainty(cfg["q0"], cfg["p0"], cfg["sigma0"],
                                                         hbar=b.hbar)
    if cfg["mode"] == "moments":
        traj = moments.evolve(m0, d, b, t_end, sample_every=every)
        cols = traj.columns()
    else:
        n = int(cfg["n"])
        if n % 2 == 0:
            n += 1
        LR, Lr = meq_grid.auto_grid(m0, d, b, t_end, margin=cfg["margin"])
        rho = meq_grid.gaussian_state(m0.mq, m0.mp, m0.sqq, m0.spp, m0.sqp, n, LR, n, Lr,
                                      hbar=b.hbar)
        snaps = () if not cfg["snapshot_times"] else [
            float(s) for s in str(cfg["snapshot_times"]).split(",")]
        run = meq_grid.evolve(rho, d, b, t_end, cfl=cfg["cfl"], sample_every=every,
                              snapshot_times=snaps)
        obs = run.observables
        cols = {
            "t": [o.t for o in obs], "trace": [o.trace for o in obs],
            "mq": [o.mean_q for o in obs], "mp": [o.mean_p for o in obs],
            "sqq": [o.sigma_qq for o in obs], "spp": [o.sigma_pp for o in obs],
            "sqp": [o.sigma_qp for o in obs],
            "uncertainty_product": [o.uncertainty_product for o in obs],
            "purity": [o.purity for o in obs], "hermiticity": [o.hermiticity for o in obs],
        }
        for s in run.snapshots:
            stem = _out(cfg, f"rho_t{s.t:.4f}")
            meq_grid.write_binary(s, stem + ".bin")
            meq_grid.write_csv(s, stem + ".csv")
        warns = {o.boundary_warning for o in obs if o.boundary_warning}
        for w in sorted(warns):
            print(f"warning: {w}", file=sys.stderr)
    path = _out(cfg, f"evolve_{cfg['mode']}.csv")
    io.write_csv(path, cols, _manifest("evolve", cfg))
    if cfg["plot"]:
        from .svgplot import line_plot
        line_plot(_out(cfg, f"evolve_{cfg['mode']}.svg"), cols["t"],
                  {"sqq": cols["sqq"], "spp": cols["spp"], "sqp": cols["sqp"]},
                  xlabel="t", ylabel="second moments")
    _finish("evolve", cfg)
    print(f"wrote {path}")


def cmd_langevin(cfg):
    from . import langevin

    b = _bath(cfg, cfg["theta"], cfg["T"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lc = langevin.correspondence_map(b, dt_gamma=cfg["dt_gamma"],
                                         t_end_gamma=cfg["t_end_gamma"],
                                         n_traj=int(cfg["n_traj"]), seed=int(cfg["seed"]),
                                         p0=cfg["p0"])
    if cfg["gamma_cl"] is not None:
        g = cfg["gamma_cl"]
        lc = langevin.LangevinConfig(gamma_cl=g, T=b.T, M=b.M, kB=b.kB,
                                     dt=cfg["dt_gamma"] / g,
                                     n_steps=int(round(cfg["t_end_gamma"] / cfg["dt_gamma"])),
                                     n_traj=int(cfg["n_traj"]), seed=int(cfg["seed"]),
                                     p0=cfg["p0"])
    if lc.warning:
        print(f"warning: {lc.warning}", file=sys.stderr)
    res = langevin.simulate(lc)
    path = _out(cfg, "langevin.csv")
    man = _manifest("langevin", cfg)
    man["gamma_cl_resolved"] = lc.gamma_cl
    io.write_csv(path, res.columns(), man)
    p2, err = res.stationary_p2()
    _finish("langevin", cfg)
    print(f"stationary <p^2>/(M kB T) = {p2 / (b.M * b.kT):.5f} +- {err / (b.M * b.kT):.5f}")
    print(f"MSD slope = {res.msd_slope():.6g} (2 kB T/(M gamma_cl) = {2 * b.kT / (b.M * lc.gamma_cl):.6g})")
    print(f"wrote {path}")


def cmd_microbath(cfg):
    from . import microbath

    kw = {k: cfg[k] for k in ("M", "gamma", "omega_c", "hbar", "kB")}
    b = BathSpec(T=kw["hbar"] * kw["omega_c"] / (2 * kw["kB"]), **kw)  # chi = 1
    omega_max = 50 * b.omega_c if cfg["omega_max"] is None else cfg["omega_max"]
    ens = microbath.sample_drude(b, int(cfg["n_modes"]), omega_max, cfg["scheme"],
                                 seed=int(cfg["seed"]))
    t_max = 5 / b.omega_c if cfg["t_max"] is None else cfg["t_max"]
    t = np.linspace(0, t_max, int(cfg["n_t"]))
    tab = microbath.kernel_table(ens, t)
    cols = {"tau": tab[:, 0], "discrete_value": tab[:, 1], "continuum_value": tab[:, 2],
            "rel_error": tab[:, 3]}
    path = _out(cfg, "microbath.csv")
    io.write_csv(path, cols, _manifest("microbath", cfg))
    if cfg["plot"]:
        from .svgplot import line_plot
        line_plot(_out(cfg, "microbath.svg"), t * b.omega_c,
                  {"discrete": cols["discrete_value"], "continuum": cols["continuum_value"]},
                  xlabel="omega_c t", ylabel="friction kernel")
    _finish("microbath", cfg)
    print(f"max relative error {cols['rel_error'].max():.4e}; "
          f"validity window {microbath.validity_window(ens) * b.omega_c:.3g}/omega_c")
    print(f"wrote {path}")


COMMANDS = {
    "coeffs": cmd_coeffs,
    "sweep": cmd_sweep,
    "critical-temp": cmd_critical_temp,
    "kernel": cmd_kernel,
    "evolve": cmd_evolve,
    "langevin": cmd_langevin,
    "microbath": cmd_microbath,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            COMMANDS[args.command](cfg)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
