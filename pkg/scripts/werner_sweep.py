"""PPT test across the Werner family, exact and (optionally) shot-based.

    python3 scripts/werner_sweep.py --steps 21 --shots 100000 --seed 1
"""

import argparse
import csv
import sys

import numpy as np

from mapnet import builtin_maps, run_positive_map_test, werner


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=11)
    ap.add_argument("--shots", type=int, help="also run shots mode with this many shots per moment")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    t = builtin_maps("transpose", 2)
    w = csv.writer(sys.stdout, lineterminator="\n")
    head = ["p", "lambda_min_exact", "oracle", "verdict_exact"]
    if args.shots:
        head += ["lambda_min_shots", "std_error", "verdict_shots"]
    w.writerow(head)
    for p in np.linspace(0, 1, args.steps):
        ex = run_positive_map_test(werner(p), t)
        row = [f"{p:.4f}", f"{ex.statistic:.12g}", f"{(1 - 3 * p) / 4:.12g}", ex.verdict]
        if args.shots:
            sh = run_positive_map_test(werner(p), t, shots=args.shots, seed=args.seed)
            row += [f"{sh.statistic:.8g}", f"{sh.std_error:.3g}", sh.verdict]
        w.writerow(row)


if __name__ == "__main__":
    main()
