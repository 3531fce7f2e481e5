"""Command-line front end for running experiment configs.

Subcommands: ``run <config.json>``, ``validate <config.json>``, ``list``.
The default thread count comes from the TNVQE_THREADS environment
variable and can be overridden with ``--threads``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("TNVQE_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tnvqe",
        description="Run network-assisted eigensolver experiments from "
                    "JSON configs.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment config")
    run.add_argument("config", help="path to the JSON config")
    run.add_argument("--output-dir", default=".",
                     help="directory for the CSV and JSON outputs")
    run.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: TNVQE_THREADS or 1)")
    run.add_argument("--seed-override", type=int, default=None,
                     help="replace the config's seed list with one seed")

    val = sub.add_parser("validate", help="validate a config, no compute")
    val.add_argument("config", help="path to the JSON config")

    sub.add_parser("list", help="list experiment kinds and their schemas")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for entry in experiments.list_experiments():
            print(json.dumps(entry))
        return 0
    if args.command == "validate":
        try:
            cfg = experiments.load_config(args.config)
            experiments.validate_config(cfg)
        except experiments.ConfigError as exc:
            print(f"invalid config: {exc}")
            return 2
        print("valid")
        return 0
    threads = args.threads if args.threads is not None else _default_threads()
    return experiments.run_config(args.config, output_dir=args.output_dir,
                                  threads=threads,
                                  seed_override=args.seed_override)


if __name__ == "__main__":
    sys.exit(main())
