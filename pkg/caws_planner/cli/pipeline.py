#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Stage orchestration behind the CLI.

Stages:
1. plan      - Hybrid-A* search -> initial trajectory
2. smooth    - plan + optimizer -> smoothed trajectory
3. rollout   - smooth + kinematic follower -> metrics (optionally of the raw search too)

Every stage writes its files into the output directory and fills a RunReport.
``report.txt`` holds only deterministic values; wall-clock timings go to
``timings.txt``.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from caws_planner.cli.io import CSV, fmt, key_value_text, write_table, write_trajectory
from caws_planner.cli.traces import TRACE_COLUMNS, emit_icm_trace, trace_rows
from caws_planner.errors import CawsError, ConstraintViolation, SolverError, ValidationError
from caws_planner.evaluate.follower import FollowerConfig, FollowRecord, rollout
from caws_planner.evaluate.metrics import Metrics, metrics, slide_ratio
from caws_planner.kinematics.types import BodyState
from caws_planner.optimizer.problem import (
    ConstraintReport,
    OptProblem,
    TrajectoryValues,
    evaluate_constraints,
)
from caws_planner.optimizer.solver import OptimizedTrajectory, solve, sweep_poses
from caws_planner.optimizer.transcription import SolverOptions
from caws_planner.search.planner import plan
from caws_planner.search.trajectory import InitialTrajectory, Trajectory
from caws_planner.world.grid import ClearanceMap, collides
from caws_planner.world.scenario import Scenario

logger = logging.getLogger(__name__)

ROLLOUT_COLUMNS = (
    "t",
    "x_ref",
    "y_ref",
    "theta_ref",
    "x",
    "y",
    "theta",
    "vx",
    "vy",
    "omega",
    "slide_literal",
    "slide_lateral",
)


@dataclass
class RunReport:
    """Outcome of one CLI invocation."""

    command: str
    seed: int = 0
    success: bool = False
    error: Optional[str] = None
    nodes_expanded: int = 0
    initial_knots: int = 0
    optimized_knots: int = 0
    initial_total_time: float = 0.0
    optimized_total_time: float = 0.0
    icm_variation_initial: float = 0.0
    icm_variation_optimized: float = 0.0
    constraints: Optional[ConstraintReport] = None
    metrics: Optional[Metrics] = None
    baseline_metrics: Optional[Metrics] = None
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        """Deterministic fields, flattened with dotted prefixes (timings excluded)."""
        out: dict[str, object] = {
            "command": self.command,
            "seed": self.seed,
            "success": self.success,
            "error": self.error or "none",
            "nodes_expanded": self.nodes_expanded,
            "initial_knots": self.initial_knots,
            "optimized_knots": self.optimized_knots,
            "initial_total_time": self.initial_total_time,
            "optimized_total_time": self.optimized_total_time,
            "icm_variation_initial": self.icm_variation_initial,
            "icm_variation_optimized": self.icm_variation_optimized,
        }
        if self.constraints is not None:
            for key, value in self.constraints.to_dict().items():
                out[f"constraints.{key}"] = value
        if self.metrics is not None:
            for key, value in self.metrics.to_dict().items():
                out[f"metrics.{key}"] = value
        if self.baseline_metrics is not None:
            for key, value in self.baseline_metrics.to_dict().items():
                out[f"baseline.{key}"] = value
        return out

    def timings_dict(self) -> dict[str, float]:
        return {f"{name}_s": seconds for name, seconds in self.timings.items()}


def _extension(output_format: str) -> str:
    return ".csv" if output_format == CSV else ".txt"


class Pipeline:
    """
    Runs the stages for one scenario and writes their outputs.

    Args:
        scenario: Planning query
        out_dir: Output directory (created on demand)
        solver: Optimizer settings
        follower: Rollout settings
        output_format: ``csv`` or ``tabular`` for trajectory and table files
        seed: Recorded in the report
    """

    def __init__(
        self,
        scenario: Scenario,
        out_dir: Union[str, Path],
        solver: Optional[SolverOptions] = None,
        follower: Optional[FollowerConfig] = None,
        output_format: str = CSV,
        seed: int = 0,
    ):
        self.scenario = scenario
        self.out_dir = Path(out_dir)
        self.solver = solver or SolverOptions()
        self.follower = follower or FollowerConfig()
        self.output_format = output_format
        self.seed = seed

    def _path(self, stem: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / f"{stem}{_extension(self.output_format)}"

    # ============================================
    # Stages
    # ============================================

    def plan(self, report: RunReport) -> InitialTrajectory:
        started = time.perf_counter()
        initial = plan(self.scenario)
        report.timings["search"] = time.perf_counter() - started
        report.nodes_expanded = initial.nodes_expanded
        report.initial_knots = len(initial)
        report.initial_total_time = initial.total_time

        trace = emit_icm_trace(initial)
        report.icm_variation_initial = trace.total_variation()
        write_trajectory(initial, self._path("initial"), self.output_format)
        write_table(list(TRACE_COLUMNS), trace_rows(trace, fmt), self._path("icm_trace"), self.output_format)
        return initial

    def smooth(self, report: RunReport, initial: InitialTrajectory) -> OptimizedTrajectory:
        started = time.perf_counter()
        try:
            optimized = solve(initial, self.scenario, self.solver)
        except SolverError as e:
            report.timings["optimize"] = time.perf_counter() - started
            report.constraints = e.report
            raise
        report.timings["optimize"] = time.perf_counter() - started
        report.constraints = optimized.report
        report.optimized_knots = len(optimized)
        report.optimized_total_time = optimized.total_time

        trace = emit_icm_trace(optimized)
        report.icm_variation_optimized = trace.total_variation()
        write_trajectory(optimized, self._path("trajectory"), self.output_format)
        write_table(
            list(TRACE_COLUMNS), trace_rows(trace, fmt), self._path("icm_trace_optimized"), self.output_format
        )
        return optimized

    def follow(self, traj: Trajectory, stem: str) -> tuple[FollowRecord, Metrics]:
        record = rollout(traj, self.follower)
        result = metrics(record, traj)
        slide = slide_ratio(record)
        table = np.column_stack(
            [record.times, record.reference[:, :3], record.achieved, slide.literal, slide.lateral]
        )
        rows = [[fmt(v) for v in row] for row in table]
        write_table(list(ROLLOUT_COLUMNS), rows, self._path(stem), self.output_format)
        return record, result

    # ============================================
    # Commands
    # ============================================

    def run(self, command: str, baseline: bool = False) -> RunReport:
        """
        Run ``plan``, ``smooth`` or ``rollout`` and write the report files.

        Raises:
            CawsError: The first failing stage's error, after the reports are written
        """
        report = RunReport(command=command, seed=self.seed)
        try:
            initial = self.plan(report)
            if command in ("smooth", "rollout"):
                optimized = self.smooth(report, initial)
                if command == "rollout":
                    started = time.perf_counter()
                    _, report.metrics = self.follow(optimized, "rollout")
                    report.timings["rollout"] = time.perf_counter() - started
                    if baseline:
                        started = time.perf_counter()
                        _, report.baseline_metrics = self.follow(initial, "rollout_baseline")
                        report.timings["baseline_rollout"] = time.perf_counter() - started
            report.success = True
        except CawsError as e:
            report.error = e.code
            raise
        finally:
            self.write_report(report)
        logger.info(f"{command}: done ({', '.join(f'{k}={v:.3f}s' for k, v in report.timings.items())})")
        return report

    def write_report(self, report: RunReport) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / "report.txt").write_text(key_value_text(report.to_dict()), encoding="utf-8")
        (self.out_dir / "timings.txt").write_text(key_value_text(report.timings_dict()), encoding="utf-8")


# ============================================
# check
# ============================================


@dataclass(frozen=True)
class CheckResult:
    report: ConstraintReport
    collides: bool

    def to_dict(self) -> dict[str, object]:
        out: dict[str, object] = dict(self.report.to_dict())
        out["collision"] = self.collides
        return out

    def verify(self, tolerance: float) -> None:
        """
        Raises:
            ConstraintViolation: A family exceeds ``tolerance`` or the sweep collides
        """
        family, worst = self.report.worst()
        if worst > tolerance:
            logger.error(f"Check failed: {family}={worst:.3e} > {tolerance:.1e}")
            raise ConstraintViolation(family, worst, tolerance)
        if self.collides:
            logger.error("Check failed: trajectory collides with the map")
            raise ConstraintViolation("collision", 1.0, tolerance)


def check_trajectory(traj: Trajectory, scenario: Scenario, check_collisions: bool = True) -> CheckResult:
    """
    Recompute every residual family of a stored trajectory.

    The trajectory is its own reference, so the tracking term is zero.

    Raises:
        BadInitialGuess: Fewer than two knots, or the first knot is not the scenario start
    """
    problem = OptProblem.from_trajectory(traj, scenario, check_goal=False)
    values = TrajectoryValues.from_trajectory(traj)
    report = evaluate_constraints(problem, values)
    hit = False
    if check_collisions:
        clearance = ClearanceMap(scenario.grid, scenario.footprint)
        hit = bool(clearance.any_collision(sweep_poses(values, scenario)))
    family, worst = report.worst()
    logger.info(f"Check: {len(traj)} knots, worst residual {family}={worst:.3e}, collision={hit}")
    return CheckResult(report=report, collides=hit)


# ============================================
# benchmark
# ============================================


@dataclass
class BenchmarkReport:
    pairs: int
    seed: int
    successes: int = 0
    failures: dict[str, int] = field(default_factory=dict)
    search_times: list[float] = field(default_factory=list)
    optimize_times: list[float] = field(default_factory=list)

    @property
    def success_rate(self) -> float:
        return self.successes / self.pairs if self.pairs else 0.0

    def to_dict(self) -> dict[str, object]:
        def stats(values: list[float]) -> tuple[float, float]:
            return (float(np.mean(values)), float(np.std(values))) if values else (0.0, 0.0)

        search_mean, search_std = stats(self.search_times)
        optimize_mean, optimize_std = stats(self.optimize_times)
        out: dict[str, object] = {
            "pairs": self.pairs,
            "seed": self.seed,
            "successes": self.successes,
            "success_rate": self.success_rate,
            "search_mean_s": search_mean,
            "search_std_s": search_std,
            "optimize_mean_s": optimize_mean,
            "optimize_std_s": optimize_std,
        }
        for code, count in sorted(self.failures.items()):
            out[f"failures.{code}"] = count
        return out


def sample_pairs(
    scenario: Scenario, count: int, seed: int, min_separation: float = 1.0, max_attempts: int = 10000
) -> list[tuple[BodyState, BodyState]]:
    """
    Collision-free resting start/goal pairs drawn uniformly over the map.

    Raises:
        ValidationError: The map leaves no room for the requested pairs
    """
    rng = np.random.default_rng(seed)
    grid, footprint = scenario.grid, scenario.footprint
    x_min, y_min, x_max, y_max = grid.bounds
    margin = footprint.circumradius

    def draw() -> Optional[BodyState]:
        for _ in range(max_attempts):
            x = rng.uniform(x_min + margin, x_max - margin)
            y = rng.uniform(y_min + margin, y_max - margin)
            theta = rng.uniform(-math.pi, math.pi)
            if not collides(grid, footprint, (x, y, theta)):
                return BodyState(x, y, theta)
        return None

    pairs = []
    for _ in range(count):
        start = draw()
        goal = draw()
        while start is not None and goal is not None:
            if math.hypot(goal.x - start.x, goal.y - start.y) >= min_separation:
                break
            goal = draw()
        if start is None or goal is None:
            raise ValidationError("benchmark", "could not sample collision-free poses in the map")
        pairs.append((start, goal))
    return pairs


def benchmark(
    scenario: Scenario, pairs: int, seed: int, solver: Optional[SolverOptions] = None
) -> BenchmarkReport:
    """Search + optimize on ``pairs`` random queries in the scenario's map."""
    solver = solver or SolverOptions()
    result = BenchmarkReport(pairs=pairs, seed=seed)
    for i, (start, goal) in enumerate(sample_pairs(scenario, pairs, seed)):
        query = scenario.replace(start=start, goal=goal)
        try:
            started = time.perf_counter()
            initial = plan(query)
            result.search_times.append(time.perf_counter() - started)
            started = time.perf_counter()
            solve(initial, query, solver)
            result.optimize_times.append(time.perf_counter() - started)
            result.successes += 1
        except CawsError as e:
            result.failures[e.code] = result.failures.get(e.code, 0) + 1
            logger.warning(f"Benchmark pair {i}: {e.code}")
    logger.info(f"Benchmark: {result.successes}/{pairs} succeeded")
    return result
