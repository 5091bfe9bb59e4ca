"""Command-line experiment runner.

Exit codes: 0 all checks passed, 1 configuration error, 2 at least one
check failed.  Set DYNSAMP_CACHE to keep a content-addressed copy of
every JSON report.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from .checks import KNOWN_CHECKS, run_experiment
from .config import ConfigError, load_config
from .errors import InvalidInput
from .presets import PRESET_NAMES, preset_config
from .report import ExperimentReport


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynsamp",
        description="Numerical experiments on frame properties of operator orbits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a declarative experiment config")
    run_p.add_argument("config", help="path to the experiment config (JSON)")
    run_p.add_argument("--out", required=True, help="report output path")
    run_p.add_argument("--format", choices=("json", "csv"), default="json")
    run_p.add_argument("--tol", type=float, default=None,
                       help="override the default tolerance")
    run_p.add_argument("--parallel", action="store_true",
                       help="run independent checks concurrently")

    repro_p = sub.add_parser("repro", help="run a curated preset")
    repro_p.add_argument("preset", help=f"one of: {', '.join(PRESET_NAMES)}")
    repro_p.add_argument("--dim", type=int, default=None)
    repro_p.add_argument("--seed", type=int, default=None)
    repro_p.add_argument("--out", default=None, help="report output path")
    return parser


def _cache_report(report: ExperimentReport) -> None:
    cache_dir = os.environ.get("DYNSAMP_CACHE")
    if not cache_dir:
        return
    path = Path(cache_dir) / f"{report.config_hash}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json())


def _summarize(report: ExperimentReport, stream=sys.stdout) -> None:
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        extra = f"  [{check.error}]" if check.error else ""
        print(f"  {check.name}: {status}{extra}", file=stream)
    print(f"overall: {'pass' if report.passed else 'FAIL'}", file=stream)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            parse_config_checks(cfg)
            if args.tol is not None:
                cfg = dataclasses.replace(
                    cfg, tolerances={**cfg.tolerances, "default": args.tol})
            report = run_experiment(cfg, parallel=args.parallel)
            report.write(args.out, fmt=args.format)
            _cache_report(report)
            _summarize(report)
        else:
            cfg = preset_config(args.preset, dim=args.dim, seed=args.seed)
            report = run_experiment(cfg)
            if args.out:
                report.write(args.out, fmt="json")
            else:
                print(report.to_json())
            _cache_report(report)
            _summarize(report, stream=sys.stderr)
    except (ConfigError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0 if report.passed else 2


def parse_config_checks(cfg) -> None:
    from .perturb import CERTIFICATE_NAMES

    for name in cfg.checks:
        base, _, suffix = name.partition(":")
        if base not in KNOWN_CHECKS:
            raise ConfigError(f"unknown check {name!r}")
        if base in ("perturbation", "satisfiability") \
                and suffix not in CERTIFICATE_NAMES:
            raise ConfigError(f"unknown certificate in check {name!r}")


if __name__ == "__main__":
    raise SystemExit(main())
