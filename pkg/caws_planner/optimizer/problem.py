#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
The smoothing program independent of any solver.

``OptProblem`` holds the constants (boundary states, direction flags, phase ids,
weights, reference poses); ``TrajectoryValues`` holds one assignment of the
decision variables. ``objective`` and ``evaluate_constraints`` evaluate them
with numpy and are what every report is built from.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from caws_planner.errors import BadInitialGuess
from caws_planner.kinematics.rigid_body import wrap_angle
from caws_planner.kinematics.types import WheelLayout
from caws_planner.optimizer.residuals import (
    mode_keyframe_residual,
    rk4_array,
    steer_limit_residual,
    steer_rate_residual,
)
from caws_planner.search.trajectory import Trajectory, keyframe_mask
from caws_planner.world.scenario import Limits, Scenario

logger = logging.getLogger(__name__)

FAMILIES = (
    "continuity",
    "steer_limit",
    "steer_rate",
    "mode_keyframe",
    "dt_bounds",
    "boundary",
    "wheel_speed",
    "wheel_accel",
    "body_limits",
)

_REST = 1e-12


@dataclass(frozen=True)
class TrajectoryValues:
    """
    Decision variables.

    Attributes:
        states: ``(H, 6)``
        controls: ``(H - 1, 3)``, control of interval ``h -> h+1``
        dts: ``(H - 1,)``
    """

    states: np.ndarray
    controls: np.ndarray
    dts: np.ndarray

    @classmethod
    def from_trajectory(cls, traj: Trajectory) -> "TrajectoryValues":
        return cls(traj.states, traj.controls[:-1], traj.dts[:-1])

    @property
    def horizon(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class OptProblem:
    """
    Constants of one smoothing program with ``H`` knots.

    Attributes:
        horizon: Knot count H
        start: Pinned first state
        goal: Pinned last state, heading unwrapped next to the reference
        flags: ``(H, n)`` direction flags
        phases: ``(H,)`` phase ids
        keyframes: ``(H,)`` mask of phase-boundary knots
        reference: ``(H, 3)`` reference poses
        layout: Wheel layout
        limits: Body limits and dt bounds
        accel_weights: Diagonal of A
        task_weight: Weight of the reference tracking term
        heading_weight: Heading share of the tracking term (m^2/rad^2)
    """

    horizon: int
    start: np.ndarray
    goal: np.ndarray
    flags: np.ndarray
    phases: np.ndarray
    keyframes: np.ndarray
    reference: np.ndarray
    layout: WheelLayout
    limits: Limits
    accel_weights: np.ndarray
    task_weight: float = 1.0
    heading_weight: float = 1.0

    @classmethod
    def from_trajectory(
        cls,
        traj: Trajectory,
        scenario: Scenario,
        reference: Optional[np.ndarray] = None,
        check_goal: bool = True,
    ) -> "OptProblem":
        """
        Build the program around a warm start.

        Args:
            traj: Warm start; its poses are the reference unless ``reference`` is given
            scenario: Scenario (boundary states, limits, weights)
            reference: ``(H, 3)`` reference poses
            check_goal: Require the warm start to end within the goal tolerance

        Raises:
            BadInitialGuess: Fewer than two knots, first knot not the start state,
                or last pose outside the goal tolerance
        """
        horizon = len(traj)
        if horizon < 2:
            raise BadInitialGuess(f"need at least 2 knots, got {horizon}", knots=horizon)
        states = traj.states
        start = scenario.start.as_array()
        if not np.allclose(states[0], start, rtol=0.0, atol=1e-9):
            raise BadInitialGuess("first knot differs from the start state", knots=horizon)

        goal = scenario.goal.as_array()
        last = states[-1]
        if check_goal:
            cfg = scenario.search
            dist = math.hypot(last[0] - goal[0], last[1] - goal[1])
            dtheta = abs(wrap_angle(goal[2] - last[2]))
            if dist > cfg.goal_position_tolerance or dtheta > cfg.goal_heading_tolerance:
                raise BadInitialGuess(
                    f"last knot {last[:3].tolist()} outside goal tolerance", distance=f"{dist:.6g}"
                )
        goal = goal.copy()
        goal[2] = last[2] + wrap_angle(goal[2] - last[2])

        phases = traj.phases
        return cls(
            horizon=horizon,
            start=start,
            goal=goal,
            flags=traj.flags,
            phases=phases,
            keyframes=keyframe_mask(phases),
            reference=states[:, :3].copy() if reference is None else np.asarray(reference, dtype=float),
            layout=traj.layout,
            limits=scenario.limits,
            accel_weights=np.asarray(scenario.weights.accel_weights, dtype=float),
            task_weight=scenario.weights.task_weight,
            heading_weight=scenario.weights.heading_weight,
        )

    def rest_pinned(self) -> np.ndarray:
        """Knots whose twist is fixed to zero: keyframes and resting boundary states."""
        pinned = self.keyframes.copy()
        pinned[0] |= bool(np.all(np.abs(self.start[3:]) <= _REST))
        pinned[-1] |= bool(np.all(np.abs(self.goal[3:]) <= _REST))
        return pinned


@dataclass
class ConstraintReport:
    """Largest violation per constraint family (all >= 0) plus solver facts."""

    continuity: float = 0.0
    steer_limit: float = 0.0
    steer_rate: float = 0.0
    mode_keyframe: float = 0.0
    dt_bounds: float = 0.0
    boundary: float = 0.0
    wheel_speed: float = 0.0
    wheel_accel: float = 0.0
    body_limits: float = 0.0
    objective: float = 0.0
    iterations: int = 0
    status: str = "evaluated"

    def residuals(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FAMILIES}

    def worst(self) -> tuple[str, float]:
        """Family with the largest violation (first on ties)."""
        items = self.residuals()
        name = max(items, key=lambda k: items[k])
        return name, items[name]

    def max_violation(self) -> float:
        return max(self.residuals().values())

    def feasible(self, tolerance: float) -> bool:
        return self.max_violation() <= tolerance

    def to_dict(self) -> dict:
        return asdict(self)


def wheel_velocities(states: np.ndarray, layout: WheelLayout) -> np.ndarray:
    """Body-frame wheel velocities ``(H, n, 2)`` for world-frame states."""
    states = np.asarray(states, dtype=float).reshape(-1, 6)
    c, s = np.cos(states[:, 2]), np.sin(states[:, 2])
    vbx = c * states[:, 3] + s * states[:, 4]
    vby = -s * states[:, 3] + c * states[:, 4]
    omega = states[:, 5]
    pos = layout.positions
    vx = vbx[:, None] - omega[:, None] * pos[None, :, 1]
    vy = vby[:, None] + omega[:, None] * pos[None, :, 0]
    return np.stack([vx, vy], axis=-1)


def wheel_accelerations(states: np.ndarray, controls: np.ndarray, layout: WheelLayout) -> np.ndarray:
    """World-frame wheel accelerations ``a - R w omega^2 + K alpha w``, shape ``(m, n, 2)``."""
    states = np.asarray(states, dtype=float).reshape(-1, 6)
    controls = np.asarray(controls, dtype=float).reshape(-1, 3)
    c, s = np.cos(states[:, 2]), np.sin(states[:, 2])
    omega2 = states[:, 5] ** 2
    alpha = controls[:, 2]
    wx, wy = layout.positions[:, 0], layout.positions[:, 1]
    # R w and K w per knot
    rwx = c[:, None] * wx - s[:, None] * wy
    rwy = s[:, None] * wx + c[:, None] * wy
    kwx = -s[:, None] * wx - c[:, None] * wy
    kwy = c[:, None] * wx - s[:, None] * wy
    ax = controls[:, 0:1] - omega2[:, None] * rwx + alpha[:, None] * kwx
    ay = controls[:, 1:2] - omega2[:, None] * rwy + alpha[:, None] * kwy
    return np.stack([ax, ay], axis=-1)


def objective(problem: OptProblem, values: TrajectoryValues) -> float:
    """
    ``sum task * (dx^2 + dy^2 + w_theta dtheta^2) + sum u^T A u dt + sum dt``.

    Tracking runs over every knot; effort and time over every interval.
    """
    diff = values.states[:, :3] - problem.reference
    task = problem.task_weight * float(
        np.sum(diff[:, 0] ** 2 + diff[:, 1] ** 2 + problem.heading_weight * diff[:, 2] ** 2)
    )
    effort = float(np.sum((values.controls**2 @ problem.accel_weights) * values.dts))
    return task + effort + float(np.sum(values.dts))


def evaluate_constraints(problem: OptProblem, values: TrajectoryValues) -> ConstraintReport:
    """
    Recompute every residual family.

    Returns:
        ConstraintReport with ``status == "evaluated"`` and zero iterations
    """
    layout = problem.layout
    limits = problem.limits
    states = np.asarray(values.states, dtype=float)
    controls = np.asarray(values.controls, dtype=float)
    dts = np.asarray(values.dts, dtype=float)
    horizon = len(states)
    report = ConstraintReport(objective=objective(problem, values))

    for h in range(horizon - 1):
        defect = states[h + 1] - rk4_array(states[h], controls[h], dts[h])
        report.continuity = max(report.continuity, float(np.max(np.abs(defect))))

    v = wheel_velocities(states, layout)
    for h in range(horizon):
        for w in range(layout.count):
            res = steer_limit_residual(
                v[h, w], int(problem.flags[h, w]), layout.steer_lower[w], layout.steer_upper[w]
            )
            report.steer_limit = max(report.steer_limit, res)
    for h in range(horizon - 1):
        for w in range(layout.count):
            res = steer_rate_residual(
                v[h + 1, w],
                v[h, w],
                int(problem.flags[h + 1, w]),
                int(problem.flags[h, w]),
                layout.max_steer_rate[w],
                dts[h],
            )
            report.steer_rate = max(report.steer_rate, -res)

    phases = problem.phases
    for h in range(horizon):
        prev_phase = phases[h - 1] if h > 0 else phases[h]
        next_phase = phases[h + 1] if h < horizon - 1 else phases[h]
        speed = math.hypot(states[h, 3], states[h, 4])
        res = mode_keyframe_residual(speed, prev_phase, phases[h], next_phase)
        report.mode_keyframe = max(report.mode_keyframe, abs(res))

    if len(dts):
        report.dt_bounds = float(
            max(0.0, np.max(limits.dt_min - dts), np.max(dts - limits.dt_max))
        )
    report.boundary = float(
        max(np.max(np.abs(states[0] - problem.start)), np.max(np.abs(states[-1] - problem.goal)))
    )

    wheel_speed = np.hypot(v[..., 0], v[..., 1])
    report.wheel_speed = float(max(0.0, np.max(wheel_speed - np.asarray(layout.max_speed))))
    if horizon > 1:
        acc = wheel_accelerations(states[:-1], controls, layout)
        acc_norm = np.hypot(acc[..., 0], acc[..., 1])
        report.wheel_accel = float(max(0.0, np.max(acc_norm - np.asarray(layout.max_accel))))
        control_excess = np.max(np.abs(controls) - np.asarray(limits.accel_bounds))
    else:
        control_excess = 0.0
    body_speed = np.hypot(states[:, 3], states[:, 4])
    report.body_limits = float(
        max(
            0.0,
            np.max(body_speed - limits.max_speed),
            np.max(np.abs(states[:, 5]) - limits.max_yaw_rate),
            control_excess,
        )
    )
    return report
