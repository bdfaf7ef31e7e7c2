"""Recompute the invariants and distances of every reference family and print them."""

import argparse

import numpy as np

from simplexwise import corpus
from simplexwise.invariants import pdd, sdd, sdm
from simplexwise.metrics import sdd_dist_emd, sdd_dist_lac, sdm_lower_bound
from simplexwise.mmspace import local_distribution, wsd, wsd_dist_emd


def show_sdd(name, cloud, h):
    s = sdd(cloud, h)
    print(f"SDD({name};{h}): {len(s)} distinct of k={s.k}")
    for r, c in s.items:
        print(f"  x{c}  D={np.round(r.D.flat(), 4).tolist()}  R={np.round(r.R, 4).tolist()}")
    print(f"  SDM({name};{h},1) = {np.round(sdm(cloud, h, 1), 8).tolist()}")


def pair(label, a, b, hs):
    for h in hs:
        A, B = sdd(a, h), sdd(b, h)
        print(f"{label} h={h}: EMD={sdd_dist_emd(A, B):.10f}  LAC={sdd_dist_lac(A, B):.10f}  "
              f"SDM bound={sdm_lower_bound(a, b, h):.10f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-h", type=int, default=3)
    args = ap.parse_args()
    hs = range(1, args.max_h + 1)

    T, K = corpus.tk().values()
    show_sdd("T", T, 2)
    show_sdd("K", K, 2)
    pair("T vs K", T, K, [h for h in hs if h < 4])

    S = corpus.s5()
    print("PDD(S-) squared rows:", np.round(pdd(S["S-"]).rows ** 2, 9).tolist())
    pair("S- vs S+", S["S-"], S["S+"], hs)

    Q = corpus.q7()
    pair("Q- vs Q+", Q["Q-"], Q["Q+"], hs)

    T6 = corpus.t6()
    print("T6 blue points:", corpus.t6_points())
    pair("T- vs T+", T6["T-"], T6["T+"], hs)
    D = corpus.t6(signs=(1, 1, 1))
    pair("degenerate T- vs T+", D["T-"], D["T+"], hs)

    X, Y = corpus.trees9().values()
    same = sorted(local_distribution(X, p) for p in range(9)) == sorted(local_distribution(Y, p) for p in range(9))
    print(f"trees: local distributions equal={same}")
    for h in (1, 2):
        print(f"trees h={h}: WSD EMD={wsd_dist_emd(wsd(X, h), wsd(Y, h)):.10f}")


if __name__ == "__main__":
    main()
