"""alpha_R(tau): Matsubara series against direct quadrature on a chi x tau grid."""

import argparse
import os
import time

import numpy as np

from qbm import kernels
from qbm.bath import BathSpec
from qbm.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--omega-c", type=float, default=20.0)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    rows = []
    for chi in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        b = BathSpec(T=args.omega_c / (2 * chi), omega_c=args.omega_c)
        for x in (0.1, 0.5, 1.0, 2.0, 5.0):
            tau = x / b.omega_c
            t0 = time.perf_counter()
            s = kernels.alpha_R_series(tau, b)
            t1 = time.perf_counter()
            q = kernels.alpha_R_quadrature(tau, b)
            t2 = time.perf_counter()
            rows.append((chi, x, s.value, q.value, abs(s.value - q.value) / abs(q.value),
                         s.terms_used, q.terms_used, t1 - t0, t2 - t1))
    rows = np.array(rows)
    names = ["chi", "tau_omega_c", "series", "quadrature", "rel_diff", "series_terms",
             "panels", "series_seconds", "quadrature_seconds"]
    write_csv(os.path.join(args.out, "kernel_check.csv"), dict(zip(names, rows.T)),
              {"script": "kernel_check", "omega_c": args.omega_c})
    print(f"max relative difference: {rows[:, 4].max():.2e}")
    print(f"series terms {int(rows[:, 5].min())}..{int(rows[:, 5].max())}, "
          f"quadrature panels {int(rows[:, 6].min())}..{int(rows[:, 6].max())}")


if __name__ == "__main__":
    main()
