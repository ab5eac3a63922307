"""Command line entry point: ``ampprep run|compare|sweep --config FILE``."""
from __future__ import annotations

import argparse
import logging
import sys

from ampprep.errors import ConfigurationError
from ampprep.harness import (
    ENGINES, cli_compare, cli_run, cli_sweep, compare_configs, load_config,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ampprep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run one configuration and emit its per-iteration trace"),
        ("compare", "run several methods on one oracle and tabulate query counts"),
        ("sweep", "run a grid of iteration counts or index widths over seeds"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--engine", choices=ENGINES)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="CSV output path (JSON written alongside)")
        p.add_argument("--workers", type=int)
        p.add_argument("--timing", action="store_true", default=None,
                       help="fill the wall_ms column (breaks byte-identical output)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        config = load_config(
            args.config, engine=args.engine, seed=args.seed, out=args.out,
            workers=args.workers, timing=args.timing,
        )
        if args.command == "run":
            text = cli_run(config).extras["csv"]
        elif args.command == "compare":
            _, text = cli_compare(compare_configs(config), config.out)
        else:
            _, text = cli_sweep(config)
    except ConfigurationError as exc:
        print(f"ampprep: error: {exc}", file=sys.stderr)
        return 2
    if not config.out:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
