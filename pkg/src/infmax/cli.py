"""Command-line entry point: ``infmax <command> --config exp.json``.

Exit status is 0 on success, 1 for configuration errors and 2 for failures
while running.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiment
from .moea import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infmax", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="experiment JSON file")
        p.add_argument("--output", help="output directory (overrides the config)")
        p.add_argument("--workers", type=int, help="parallel runs")
        p.add_argument("--seed", type=int, help="base random seed (overrides the config)")
        return p

    common(sub.add_parser("preprocess", help="clean a graph and write it with its communities"))
    common(sub.add_parser("run", help="optimizer runs, fronts and hypervolume summary"))
    b = common(sub.add_parser("baseline", help="GDD or CELF prefix-swept fronts"))
    b.add_argument("which", choices=("gdd", "celf"))
    a = common(sub.add_parser("analyze", help="correlation matrix and hypervolume table"),
               config_required=False)
    a.add_argument("fronts", nargs="+", help="front CSV files")
    common(sub.add_parser("detect-communities", help="modularity-based partition"))
    return parser


def _dispatch(args) -> dict:
    if args.command == "analyze":
        out = args.output
        if out is None and args.config:
            out = experiment.load_config(args.config).output_dir
        return experiment.cmd_analyze(args.fronts, out or ".")
    cfg = experiment.load_config(args.config, output_dir=args.output, workers=args.workers,
                                 rng_seed_base=args.seed)
    if args.command == "preprocess":
        return experiment.cmd_preprocess(cfg)
    if args.command == "run":
        return experiment.cmd_run(cfg)
    if args.command == "baseline":
        return experiment.cmd_baseline(cfg, args.which)
    return experiment.cmd_detect_communities(cfg, args.seed)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        result = _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - reported, not swallowed
        logging.getLogger("infmax").debug("failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.verbose:
        print(json.dumps(result, indent=2, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
