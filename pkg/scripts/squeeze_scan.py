"""Scan squeezed minimum-uncertainty states for violations of the
uncertainty bound as a function of temperature."""

import argparse
import os

import numpy as np

from qbm import moments
from qbm.bath import BathSpec
from qbm.coefficients import critical_temperature, diffusion_constants
from qbm.io import write_csv
from qbm.svgplot import line_plot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    thetas = np.geomspace(0.02, 2.0, 25)
    rows = []
    for th in thetas:
        b = BathSpec.from_theta(th)
        d = diffusion_constants(b)
        gap, ratio, angle, t = moments.squeeze_scan(d, b)
        rows.append((th, d.Delta, gap, ratio, angle, t))
        print(f"theta {th:7.4f}  Delta {d.Delta:+.4f}  min gap {gap:+.3e}  "
              f"(ratio {ratio:.3g}, angle {angle:.3f}, t {t:.2f})")
    rows = np.array(rows)
    names = ["theta", "Delta", "min_gap", "ratio", "angle", "t"]
    write_csv(os.path.join(args.out, "squeeze_scan.csv"), dict(zip(names, rows.T)))
    line_plot(os.path.join(args.out, "squeeze_scan.svg"), thetas,
              {"min gap": rows[:, 2], "Delta": rows[:, 1]}, xlabel="log10 theta",
              ylabel="", logx=True)
    print(f"critical theta0 = {critical_temperature().theta0:.5f}")


if __name__ == "__main__":
    main()
