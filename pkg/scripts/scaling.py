"""Wall-clock time of SDD and its EMD against cloud size."""

import argparse
import time

import numpy as np

from simplexwise.core import cloud_from_coordinates
from simplexwise.invariants import sdd
from simplexwise.metrics import sdd_dist_emd


def timed(fn, *a):
    t0 = time.perf_counter()
    out = fn(*a)
    return out, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 25, 50, 100])
    ap.add_argument("--h", type=int, default=2)
    ap.add_argument("--emd-max", type=int, default=15, help="skip the EMD above this size")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    prev = None
    for m in args.sizes:
        a = cloud_from_coordinates(rng.random((m, 3)))
        b = cloud_from_coordinates(rng.random((m, 3)))
        A, t_sdd = timed(sdd, a, args.h)
        line = f"m={m:4d}  SDD {t_sdd:8.3f}s"
        if prev:
            pm, pt = prev
            line += f"  exponent {np.log(t_sdd / pt) / np.log(m / pm):.2f}"
        prev = (m, t_sdd)
        if m <= args.emd_max:
            _, t_emd = timed(sdd_dist_emd, A, sdd(b, args.h))
            line += f"  EMD {t_emd:8.3f}s"
        print(line)


if __name__ == "__main__":
    main()
