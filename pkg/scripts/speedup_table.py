"""Query totals of the three pipelines on one-marked tables of growing size.

Usage: python3 scripts/speedup_table.py [--max-n 10] [--out speedup.csv]
"""
import argparse
import sys

import numpy as np

from ampprep.harness import ExperimentConfig, cli_compare, compare_configs
from ampprep.report import fmt, write_csv

COLUMNS = ("n", "iterations", "baseline", "fast_rz", "fast_kickback", "ratio_rz", "ratio_kickback")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-n", type=int, default=2)
    ap.add_argument("--max-n", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    rows = []
    for n in range(args.min_n, args.max_n + 1):
        values = [0] * (1 << n)
        values[int(rng.integers(1 << n))] = 1
        base = ExperimentConfig(oracle_source="inline", values=values, m=2, engine="structured")
        result, _ = cli_compare(compare_configs(base))
        by = {r["method"]: r for r in result}
        rows.append({
            "n": n,
            "iterations": by["baseline"]["iterations"],
            "baseline": by["baseline"]["total_queries"],
            "fast_rz": by["fast-rz"]["total_queries"],
            "fast_kickback": by["fast-kickback"]["total_queries"],
            "ratio_rz": by["fast-rz"]["query_ratio_vs_baseline"],
            "ratio_kickback": by["fast-kickback"]["query_ratio_vs_baseline"],
        })
    text = write_csv(rows, COLUMNS)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
