"""Discrete-bath friction kernel against the continuum as the mode count grows."""

import argparse
import math
import os

import numpy as np

from qbm import microbath
from qbm.bath import BathSpec
from qbm.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--omega-max-factor", type=float, default=50.0)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    b = BathSpec(T=10.0)
    wmax = args.omega_max_factor * b.omega_c
    t = np.linspace(0, 5 / b.omega_c, 501)
    trunc = microbath.friction_kernel_truncated(b, t, wmax)
    rows = []
    for n in (16, 32, 64, 160, 256, 1024, 4096, 10_000, 40_000):
        ens = microbath.sample_drude(b, n, omega_max=wmax)
        win = microbath.validity_window(ens)
        sel = t <= win
        d = microbath.friction_kernel_discrete(ens, t)
        e_full = np.max(np.abs(d - microbath.friction_kernel_continuum(b, t))[sel]
                        / microbath.friction_kernel_continuum(b, t)[sel])
        e_trunc = np.max(np.abs(d - trunc)[sel] / np.abs(trunc)[sel])
        rows.append((n, win * b.omega_c, e_full, e_trunc))
        print(f"N {n:6d}  window {win * b.omega_c:7.3g}/wc  err vs exp {e_full:.4e}  "
              f"vs truncated {e_trunc:.3e}")
    print(f"cutoff deficit (2/pi) arctan(wc/omega_max) = "
          f"{2 / math.pi * math.atan(b.omega_c / wmax):.4e}")
    rows = np.array(rows)
    write_csv(os.path.join(args.out, "microbath_convergence.csv"),
              dict(zip(["n_modes", "window_omega_c", "err_exponential", "err_truncated"], rows.T)),
              vars(args))


if __name__ == "__main__":
    main()
