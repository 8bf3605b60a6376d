#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
caws-planner command line

Subcommands:
    plan       Search only
    smooth     Search + optimize
    rollout    Search + optimize + kinematic rollout and metrics
    check      Recompute the residuals of a trajectory file
    benchmark  Search + optimize on random start/goal pairs

Exit status 0 means every requested stage succeeded. Failures print one
``error=<CODE> key=value ...`` line on stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from caws_planner.cli.io import FORMATS, key_value_text, read_trajectory
from caws_planner.cli.pipeline import Pipeline, benchmark, check_trajectory
from caws_planner.config import get_settings
from caws_planner.errors import CawsError, ValidationError
from caws_planner.evaluate.follower import FollowerConfig
from caws_planner.logging_config import setup_logging
from caws_planner.optimizer.transcription import SolverOptions
from caws_planner.world.scenario import load_scenario_file

logger = logging.getLogger(__name__)

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _common(parser: argparse.ArgumentParser, default_out: str) -> None:
    parser.add_argument("--scenario", required=True, type=Path, help="Scenario TOML file")
    parser.add_argument("--out", type=Path, default=Path(default_out), help="Output directory")
    parser.add_argument("--seed", type=int, default=0, help="Seed for randomized steps (default 0)")
    parser.add_argument("--max-iter", type=int, default=3000, help="Optimizer iteration limit")
    parser.add_argument("--feas-tol", type=float, default=1e-6, help="Accepted constraint residual")
    parser.add_argument("--opt-tol", type=float, default=1e-6, help="Optimality tolerance")
    parser.add_argument("--format", choices=FORMATS, default="csv", dest="output_format")
    parser.add_argument("--log-level", default=None, help="Override CAWS_LOG_LEVEL")


def build_parser() -> argparse.ArgumentParser:
    default_out = get_settings().output_dir
    parser = argparse.ArgumentParser(
        prog="caws-planner",
        description="Constrained all-wheel-steering trajectory planner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (
        ("plan", "Hybrid-A* search only"),
        ("smooth", "Search and optimize"),
    ):
        _common(sub.add_parser(name, help=text), default_out)

    rollout = sub.add_parser("rollout", help="Search, optimize, roll out and report metrics")
    _common(rollout, default_out)
    rollout.add_argument("--baseline", action="store_true", help="Also roll out the raw search trajectory")
    rollout.add_argument("--period", type=float, default=0.02, help="Follower sample period (s)")

    check = sub.add_parser("check", help="Re-validate a trajectory file")
    _common(check, default_out)
    check.add_argument("--trajectory", required=True, type=Path, help="Trajectory CSV to check")
    check.add_argument("--no-collision", action="store_true", help="Skip the collision sweep")

    bench = sub.add_parser("benchmark", help="Success rate and timings on random queries")
    _common(bench, default_out)
    bench.add_argument("--pairs", type=int, default=20, help="Number of start/goal pairs")
    return parser


def _solver_options(args: argparse.Namespace) -> SolverOptions:
    if args.max_iter <= 0:
        raise ValidationError("--max-iter", "must be positive")
    if args.feas_tol <= 0 or args.opt_tol <= 0:
        raise ValidationError("--feas-tol/--opt-tol", "must be positive")
    return SolverOptions(
        max_iter=args.max_iter,
        opt_tol=args.opt_tol,
        feas_tol=args.feas_tol,
        print_level=get_settings().ipopt_print_level,
    )


def run(args: argparse.Namespace) -> int:
    """Execute one parsed invocation; raises CawsError on failure."""
    solver = _solver_options(args)
    scenario = load_scenario_file(args.scenario)
    out_dir: Path = args.out

    if args.command == "check":
        traj = read_trajectory(args.trajectory, scenario.layout)
        result = check_trajectory(traj, scenario, check_collisions=not args.no_collision)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "check.txt").write_text(key_value_text(result.to_dict()), encoding="utf-8")
        result.verify(args.feas_tol)
        print(f"ok knots={len(traj)} worst={result.report.max_violation():.3e}")
        return 0

    if args.command == "benchmark":
        if args.pairs <= 0:
            raise ValidationError("--pairs", "must be positive")
        report = benchmark(scenario, args.pairs, args.seed, solver)
        out_dir.mkdir(parents=True, exist_ok=True)
        text = key_value_text(report.to_dict())
        (out_dir / "benchmark.txt").write_text(text, encoding="utf-8")
        sys.stdout.write(text)
        return 0

    follower = FollowerConfig(period=args.period) if args.command == "rollout" else None
    pipeline = Pipeline(
        scenario, out_dir, solver=solver, follower=follower, output_format=args.output_format, seed=args.seed
    )
    report = pipeline.run(args.command, baseline=getattr(args, "baseline", False))
    print(f"ok command={args.command} out={out_dir} success={str(report.success).lower()}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        status = int(e.code or 0)
        if status:
            print("error=PARSE_ERROR message='invalid command line'", file=sys.stderr)
        return status

    settings = get_settings()
    log_level = (args.log_level or settings.log_level).upper()
    if log_level not in _LOG_LEVELS:
        print(ValidationError("--log-level", f"unknown level {log_level!r}").one_line(), file=sys.stderr)
        return ValidationError.exit_status
    setup_logging(
        log_level=log_level,
        log_dir=settings.log_dir,
        log_file=settings.log_file,
        enable_file=settings.log_to_file,
    )
    if log_level == "DEBUG":
        settings.print_config(logger)

    try:
        return run(args)
    except CawsError as e:
        print(e.one_line(), file=sys.stderr)
        return e.exit_status
    except Exception as e:
        logger.exception("Unexpected failure")
        print(f"error=INTERNAL type={type(e).__name__} message={str(e)!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
