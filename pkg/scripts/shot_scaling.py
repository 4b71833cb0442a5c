"""How the reconstructed λ_min of ρ^{T_B} tightens with the shot budget.

For each shot count, repeats the shots-mode PPT test over several seeds and
reports the empirical spread next to the bootstrap std error.

    python3 scripts/shot_scaling.py --p 0.8 --repeats 20
"""

import argparse

import numpy as np

from mapnet import builtin_maps, run_positive_map_test, werner


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=0.8)
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--shots", type=int, nargs="+", default=[10**3, 10**4, 10**5, 10**6])
    args = ap.parse_args(argv)

    rho, t = werner(args.p), builtin_maps("transpose", 2)
    truth = (1 - 3 * args.p) / 4
    print(f"Werner p={args.p}: exact λ_min = {truth:.6f}")
    print(f"{'shots':>9} {'mean':>10} {'emp. std':>10} {'boot std':>10} {'detected':>9}")
    for n in args.shots:
        reps = [run_positive_map_test(rho, t, shots=n, seed=s) for s in range(args.repeats)]
        stats = np.array([r.statistic for r in reps])
        boot = np.mean([r.std_error for r in reps])
        hits = sum(r.entangled for r in reps)
        print(f"{n:>9} {stats.mean():>10.5f} {stats.std(ddof=1):>10.5f} {boot:>10.5f} {hits:>5}/{len(reps)}")


if __name__ == "__main__":
    main()
