"""Perturbation sweep: largest observed EMD/LAC relative to the 2*eps bound."""

import argparse

from simplexwise import corpus
from simplexwise.metrics import lipschitz_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.01, 0.05, 0.1, 0.2])
    ap.add_argument("--h", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    clouds = {**corpus.tk(), "S-": corpus.s5()["S-"], "Q-": corpus.q7()["Q-"]}
    print(f"{'cloud':6} {'h':>2} {'eps':>6} {'max EMD/2eps':>13} {'max LAC/2eps':>13} {'violations':>10}")
    for name, c in clouds.items():
        for h in args.h:
            for eps in args.eps:
                rep = lipschitz_check(c, eps, args.trials, h, seed=args.seed)
                e = max(t.emd for t in rep.trials) / (2 * eps)
                l = max(t.lac for t in rep.trials) / (2 * eps)
                print(f"{name:6} {h:>2} {eps:>6.3f} {e:>13.4f} {l:>13.4f} {len(rep.failed):>10}")


if __name__ == "__main__":
    main()
