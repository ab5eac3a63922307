"""Wall time of the structured engine for large index registers.

Usage: python3 scripts/structured_scaling.py --max-n 20 --k 20
"""
import argparse
import sys
import time

from ampprep.fastprep import FastMethod
from ampprep.harness import random_oracle
from ampprep.report import write_csv
from ampprep.structsim import reduced_run

COLUMNS = ("n", "k", "route", "queries", "p_success", "seconds")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-n", type=int, default=8)
    ap.add_argument("--max-n", type=int, default=18)
    ap.add_argument("--m", type=int, default=6)
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rows = []
    for n in range(args.min_n, args.max_n + 1):
        table = random_oracle(n, args.m, args.seed)
        for route in ("rz", "kickback"):
            start = time.perf_counter()
            report, _ = reduced_run(table, FastMethod(route), args.k)
            rows.append({
                "n": n, "k": args.k, "route": route, "queries": report.total_queries,
                "p_success": report.p_success, "seconds": time.perf_counter() - start,
            })
    sys.stdout.write(write_csv(rows, COLUMNS))


if __name__ == "__main__":
    main()
