"""Command line driver: lerwlab <experiment> --config FILE [overrides]."""

from __future__ import annotations

import argparse
import json
import sys

from .config import EXPERIMENTS, ExperimentConfig, load_config
from .experiments import run_experiment


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lerwlab",
        description="Loop-erased walk / SLE(2) scaling-law experiments",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--replicas", type=int, help="override the replica count")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any config key (repeatable)",
    )
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.config:
        config = load_config(args.config, experiment=args.experiment)
        if config.experiment != args.experiment:
            print(
                f"config names experiment {config.experiment!r}, running it",
                file=sys.stderr,
            )
    else:
        config = ExperimentConfig(experiment=args.experiment)
    if args.seed is not None:
        config.params["seed"] = args.seed
    if args.replicas is not None:
        config.params["replicas"] = args.replicas
    for kv in args.set:
        if "=" not in kv:
            print(f"bad --set {kv!r}, want KEY=VALUE", file=sys.stderr)
            return 2
        k, v = kv.split("=", 1)
        config.params[k.strip()] = v.strip()
    record = run_experiment(config)
    record.write(args.out)
    print(json.dumps({"experiment": config.experiment, "out": args.out}, sort_keys=True))
    print(json.dumps(record.summary, sort_keys=True, default=str, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
