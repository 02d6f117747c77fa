"""Delta(theta) and the three diffusion constants over theta in [0.01, 100];
locates the sign change of Delta."""

import argparse
import os

import numpy as np

from qbm import coefficients as coef
from qbm.io import write_csv
from qbm.svgplot import line_plot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--n", type=int, default=400)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    theta = coef.theta_grid(1e-2, 1e2, args.n)
    rows = np.array(coef.sweep(theta))
    cols = dict(zip(["theta", "T", "D_qq", "D_pq", "D_pp", "Delta"], rows.T))
    write_csv(os.path.join(args.out, "delta_sweep.csv"), cols, {"script": "delta_sweep"})
    line_plot(os.path.join(args.out, "delta_sweep.svg"), theta, {"Delta": cols["Delta"]},
              xlabel="log10 theta", ylabel="Delta / (hbar gamma)^2", logx=True)

    cp = coef.critical_temperature()
    print(f"theta0 = {cp.theta0:.10f}  (u* = {cp.u_star:.8f}, {cp.iterations} bisections)")
    print(f"Delta at theta = 1e2: {cols['Delta'][-1]:.8f}  (1/12 = {1 / 12:.8f})")
    print(f"Delta at theta = 1e-2: {cols['Delta'][0]:.6f}  (T = 0 limit -1/4)")


if __name__ == "__main__":
    main()
