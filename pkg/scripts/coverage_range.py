"""UAV-AP distance at which combined coverage drops to a target, per number of rounds."""

import argparse

from scipy import optimize

from uavris import analytics as an
from uavris.config import paper_default


def coverage_distance(N, l, target, **overrides):
    def gap(d2):
        return an.coverage_cc(paper_default(N=N, d2=d2, **overrides), None, l).value - target
    return optimize.brentq(gap, 10.0, 2000.0, xtol=1e-6)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, default=400)
    parser.add_argument("--target", type=float, default=0.9)
    parser.add_argument("--rounds", type=int, nargs="+", default=[1, 2, 3])
    args = parser.parse_args()
    base = None
    for l in args.rounds:
        d = coverage_distance(args.N, l, args.target)
        base = base or d
        print(f"L={l}: d2 = {d:.2f} m  ({d / base:.3f} x L={args.rounds[0]})")


if __name__ == "__main__":
    main()
