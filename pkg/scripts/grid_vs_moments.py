"""Integrate the master equation on the (R, r) grid and compare the second
moments with the exact moment ODE."""

import argparse
import os

import numpy as np

from qbm import meq_grid, moments
from qbm.bath import BathSpec
from qbm.coefficients import diffusion_constants
from qbm.io import write_csv
from qbm.svgplot import line_plot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--theta", type=float, default=1.0)
    ap.add_argument("--sigma0", type=float, default=1.0, help="pure-state width")
    ap.add_argument("--sqq", type=float, help="mixed state: sigma_qq (sigma_pp = M kT)")
    ap.add_argument("--p0", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=257)
    ap.add_argument("--cfl", type=float, default=2.0)
    ap.add_argument("--margin", type=float, default=6.5)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    b = BathSpec.from_theta(args.theta)
    d = diffusion_constants(b)
    if args.sqq is None:
        m0 = moments.GaussianMoments.minimum_uncertainty(0.0, args.p0, args.sigma0)
    else:
        m0 = moments.GaussianMoments(0.0, args.p0, args.sqq, b.M * b.kT)
    t_end = 5 / b.gamma
    n_r = args.n | 1
    LR, Lr = meq_grid.auto_grid(m0, d, b, t_end, margin=args.margin)
    rho = meq_grid.gaussian_state(m0.mq, m0.mp, m0.sqq, m0.spp, m0.sqp, args.n, LR, n_r, Lr)
    print(f"grid {args.n}x{n_r}, half widths R {LR:.3g}, r {Lr:.3g}, "
          f"dt = {meq_grid.stable_dt(rho, d, b, args.cfl):.3g}")
    run = meq_grid.evolve(rho, d, b, t_end, cfl=args.cfl, sample_every=0.05 / b.gamma)
    obs = run.observables
    t = np.array([o.t for o in obs])
    ex = moments.evolve_exact(m0, d, b, t).y
    cols = {
        "t": t,
        "sqq_grid": [o.sigma_qq for o in obs], "sqq_ode": ex[:, 2],
        "spp_grid": [o.sigma_pp for o in obs], "spp_ode": ex[:, 3],
        "sqp_grid": [o.sigma_qp for o in obs], "sqp_ode": ex[:, 4],
        "trace": [o.trace for o in obs], "purity": [o.purity for o in obs],
    }
    tag = f"theta{args.theta:g}"
    write_csv(os.path.join(args.out, f"grid_vs_moments_{tag}.csv"), cols, vars(args))
    line_plot(os.path.join(args.out, f"grid_vs_moments_{tag}.svg"), t,
              {"sqq grid": cols["sqq_grid"], "sqq ode": ex[:, 2],
               "spp grid": cols["spp_grid"], "spp ode": ex[:, 3]},
              xlabel="gamma t", ylabel="variance")
    g = np.array([cols["sqq_grid"], cols["spp_grid"], cols["sqp_grid"]]).T
    rel = np.abs(g - ex[:, 2:5])
    rel[:, :2] /= ex[:, 2:4]
    rel[:, 2] /= np.sqrt(ex[:, 2] * ex[:, 3])
    print(f"max rel err qq {rel[:, 0].max():.2e}, pp {rel[:, 1].max():.2e}, "
          f"qp {rel[:, 2].max():.2e}")
    print(f"trace drift {max(abs(o.trace - 1) for o in obs):.2e}, hermiticity "
          f"{run.diagnostics.hermiticity_drift:.2e}, {run.diagnostics.steps} steps")
    warns = [o.t for o in obs if o.boundary_warning]
    if warns:
        print(f"boundary contamination from t = {warns[0]:.3g}")


if __name__ == "__main__":
    main()
