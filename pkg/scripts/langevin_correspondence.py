"""High-temperature check: master-equation moments vs a classical Langevin
ensemble with gamma_cl = 2 gamma."""

import argparse
import os

from qbm import langevin, moments
from qbm.bath import BathSpec
from qbm.coefficients import diffusion_constants
from qbm.io import write_csv
from qbm.svgplot import line_plot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--theta", type=float, default=100.0)
    ap.add_argument("--n-traj", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=20240917)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    b = BathSpec.from_theta(args.theta)
    d = diffusion_constants(b)
    cfg = langevin.correspondence_map(b, n_traj=args.n_traj, seed=args.seed)
    res = langevin.simulate(cfg)
    ode = moments.evolve_exact(moments.GaussianMoments(0, 0, 1e-12, 1e-12), d, b, res.t)
    cols = res.columns()
    cols["var_p_me"] = ode.y[:, 3]
    cols["var_q_me"] = ode.y[:, 2]
    write_csv(os.path.join(args.out, "langevin_correspondence.csv"), cols, vars(args))
    line_plot(os.path.join(args.out, "langevin_correspondence.svg"), res.t,
              {"Langevin <p^2>": res.var_p, "master equation": ode.y[:, 3]},
              xlabel="t", ylabel="momentum variance")
    mkT = b.M * b.kT
    p2, se = res.stationary_p2()
    st = moments.stationary(d, b)
    print(f"<p^2>/MkT: Langevin {p2 / mkT:.5f} +- {se / mkT:.5f}, ME {st['spp'] / mkT:.5f}")
    print(f"Euler-Maruyama stationary bias 1/(1 - gamma_cl dt/2) = "
          f"{1 / (1 - cfg.gamma_cl * cfg.dt / 2):.5f}")
    print(f"position diffusion slope: Langevin {res.msd_slope():.4f}, ME {st['sqq_slope']:.4f}")


if __name__ == "__main__":
    main()
