"""Success probability against iteration count, measured and predicted.

Usage: python3 scripts/rotation_curve.py --n 4 --m 4 --seed 3 --k-max 12
"""
import argparse
import math
import sys

from ampprep.baseline import run_baseline
from ampprep.fastprep import FastMethod, run_fast
from ampprep.harness import random_oracle
from ampprep.oracle import angles
from ampprep.report import write_csv

COLUMNS = ("iteration", "predicted", "baseline", "fast_rz", "fast_kickback")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k-max", type=int, default=10)
    ap.add_argument("--q", type=int, help="phase register width for kickback (default m+4)")
    args = ap.parse_args(argv)

    table = random_oracle(args.n, args.m, args.seed)
    theta = angles(table).theta
    curves = [
        run_baseline(table, args.k_max)[0],
        run_fast(table, FastMethod("rz"), args.k_max)[0],
        run_fast(table, FastMethod("kickback", q=args.q), args.k_max)[0],
    ]
    rows = []
    for k in range(args.k_max + 1):
        rows.append({
            "iteration": k,
            "predicted": math.sin((2 * k + 1) * theta) ** 2,
            "baseline": curves[0].records[k].p_success,
            "fast_rz": curves[1].records[k].p_success,
            "fast_kickback": curves[2].records[k].p_success,
        })
    print(f"# table={list(table.values)} theta={theta:.6f}", file=sys.stderr)
    sys.stdout.write(write_csv(rows, COLUMNS))


if __name__ == "__main__":
    main()
