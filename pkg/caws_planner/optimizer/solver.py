#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Trajectory smoothing entry point.

Flow:
1. Validate the warm start and build the OptProblem
2. Transcribe and solve with IPOPT
3. Recompute every residual family with numpy, then post-check collisions
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from caws_planner.errors import Infeasible, MaxIterations
from caws_planner.optimizer.problem import (
    ConstraintReport,
    OptProblem,
    TrajectoryValues,
    evaluate_constraints,
)
from caws_planner.optimizer.residuals import rk4_array
from caws_planner.optimizer.transcription import SolverOptions, TrajectoryTranscription
from caws_planner.search.trajectory import Trajectory, build_knots
from caws_planner.world.grid import ClearanceMap, sample_count
from caws_planner.world.scenario import Scenario

logger = logging.getLogger(__name__)

_ITERATION_LIMIT = {"Maximum_Iterations_Exceeded", "Maximum_CpuTime_Exceeded", "Maximum_WallTime_Exceeded"}


@dataclass(frozen=True)
class OptimizedTrajectory(Trajectory):
    """Smoothed trajectory; wheel fields are recomputed from the optimized states."""

    report: ConstraintReport = field(default_factory=ConstraintReport)
    solve_time: float = 0.0


def trajectory_from_values(
    problem: OptProblem, values: TrajectoryValues, report: ConstraintReport, solve_time: float = 0.0
) -> OptimizedTrajectory:
    controls = np.vstack([values.controls.reshape(-1, 3), np.zeros((1, 3))])
    dts = np.concatenate([values.dts, [0.0]])
    knots = build_knots(values.states, controls, dts, problem.phases, problem.flags, problem.layout)
    return OptimizedTrajectory(knots=knots, layout=problem.layout, report=report, solve_time=solve_time)


def sweep_poses(values: TrajectoryValues, scenario: Scenario) -> np.ndarray:
    """
    Poses sampled along every interval, exact for the double-integrator motion.

    No footprint point moves more than half a cell between consecutive samples.
    """
    states = values.states
    poses = [states[:1, :3]]
    for h in range(len(values.dts)):
        dt = float(values.dts[h])
        u = values.controls[h]
        speed = max(np.hypot(*states[h, 3:5]), np.hypot(*states[h + 1, 3:5]))
        yaw = max(abs(states[h, 5]), abs(states[h + 1, 5]))
        count = sample_count(scenario.footprint, speed * dt, yaw * dt, scenario.grid.resolution)
        for k in range(1, count + 1):
            poses.append(rk4_array(states[h], u, dt * k / count)[None, :3])
    return np.vstack(poses)


def solve(
    initial: Trajectory,
    scenario: Scenario,
    options: Optional[SolverOptions] = None,
    reference: Optional[np.ndarray] = None,
) -> OptimizedTrajectory:
    """
    Smooth a search trajectory.

    Args:
        initial: Warm start (and reference poses unless ``reference`` is given)
        scenario: Scenario
        options: Solver settings
        reference: Optional ``(H, 3)`` reference poses

    Returns:
        OptimizedTrajectory whose report satisfies every family within ``feas_tol``

    Raises:
        BadInitialGuess: Warm start violates the boundary conditions
        MaxIterations: Iteration limit hit (``trajectory`` holds the best iterate)
        Infeasible: Residual above ``feas_tol`` at termination, or a collision
    """
    options = options or SolverOptions()
    problem = OptProblem.from_trajectory(initial, scenario, reference=reference)
    warm = TrajectoryValues.from_trajectory(initial)
    limits = scenario.limits
    if np.any(warm.dts < limits.dt_min) or np.any(warm.dts > limits.dt_max):
        logger.warning(f"Warm start dt outside [{limits.dt_min}, {limits.dt_max}], clipped")

    logger.info(f"Optimizing {problem.horizon} knots (max_iter={options.max_iter})")
    started = time.perf_counter()
    transcription = TrajectoryTranscription(problem, options)
    result = transcription.solve(warm)
    elapsed = time.perf_counter() - started

    values = TrajectoryValues(
        states=result.values.states,
        controls=result.values.controls,
        dts=np.clip(result.values.dts, limits.dt_min, limits.dt_max),
    )
    report = evaluate_constraints(problem, values)
    report.iterations = result.iterations
    report.status = result.status
    trajectory = trajectory_from_values(problem, values, report, elapsed)

    if result.status in _ITERATION_LIMIT:
        logger.error(f"Optimizer hit the iteration limit after {result.iterations} iterations")
        raise MaxIterations(
            f"solver stopped at the iteration limit ({result.iterations})",
            report=report,
            trajectory=trajectory,
            iterations=result.iterations,
        )

    family, worst = report.worst()
    if not result.success or worst > options.feas_tol or not np.all(np.isfinite(values.states)):
        logger.error(f"Optimizer result infeasible: status={result.status}, {family}={worst:.3e}")
        raise Infeasible(
            f"solver status {result.status}, worst residual {family}={worst:.3e}",
            report=report,
            trajectory=trajectory,
            family=family,
            status=result.status,
        )

    if options.check_collisions:
        clearance = ClearanceMap(scenario.grid, scenario.footprint)
        if clearance.any_collision(sweep_poses(values, scenario)):
            logger.error("Optimized trajectory collides with the map")
            raise Infeasible(
                "optimized trajectory collides", report=report, trajectory=trajectory, family="collision"
            )

    logger.info(
        f"Optimized: total_time={trajectory.total_time:.3f}s, objective={report.objective:.6g}, "
        f"worst residual {family}={worst:.2e}, {elapsed:.3f}s"
    )
    return trajectory
