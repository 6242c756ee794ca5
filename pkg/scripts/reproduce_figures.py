"""Write one CSV per figure preset into an output directory.

    python3 scripts/reproduce_figures.py --out-dir results --trials 10000
"""

import argparse
import time
from pathlib import Path

from uavris.cli import main as cli_main
from uavris.sweep import FIGURES


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--trials", type=int, default=None,
                        help="override Monte-Carlo trials (0 disables simulation)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("figures", nargs="*", default=sorted(FIGURES))
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.figures:
        argv = ["sweep", "--preset", name, "--seed", str(args.seed),
                "--workers", str(args.workers), "--out", str(out / f"{name}.csv")]
        if args.trials is not None:
            argv += ["--trials", str(args.trials)]
        t0 = time.perf_counter()
        cli_main(argv)
        print(f"{name}: {time.perf_counter() - t0:.1f} s -> {out / (name + '.csv')}")


if __name__ == "__main__":
    main()
