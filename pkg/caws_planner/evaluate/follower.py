#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Rate-limited kinematic trajectory follower.

Each tick:
1. Sample the reference and form the commanded body twist (feed-forward + pose feedback)
2. Convert it into per-wheel steering and speed commands
3. Move the achieved wheel states toward the commands under steering-rate and
   wheel-acceleration limits
4. Fit the rigid body twist that best explains the achieved wheel velocities and
   advance the pose with it by one exact rigid step

Trajectories ending at rest are followed past their last knot until the wheels
have stopped (bounded by ``FollowerConfig.settle_time``).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from caws_planner.kinematics.rigid_body import rotation, wheel_states, wrap_angle
from caws_planner.kinematics.types import WheelLayout
from caws_planner.optimizer.residuals import rk4_array
from caws_planner.search.maneuvers import rigid_step, rigid_twist_between, world_velocity
from caws_planner.search.trajectory import InitialTrajectory, Trajectory

logger = logging.getLogger(__name__)

DOUBLE_INTEGRATOR = "double_integrator"
RIGID = "rigid"

# Time within which a sample is taken to be at a knot (s)
_KNOT_TIME_EPS = 1e-9
_REST = 1e-9
# Steering-range gain needed before a wheel command is reversed (rad)
_FLIP_MARGIN = math.pi / 4


@dataclass(frozen=True)
class FollowerConfig:
    """
    Follower settings.

    Attributes:
        period: Sample period (s)
        position_gain: Proportional position feedback (1/s)
        heading_gain: Proportional heading feedback (1/s)
        settle_time: Longest extra time spent stopping after a rest-to-rest trajectory ends (s)
    """

    period: float = 0.02
    position_gain: float = 2.0
    heading_gain: float = 2.0
    settle_time: float = 3.0


@dataclass(frozen=True)
class FollowRecord:
    """
    Time series of one rollout; every array has one row per tick.

    Attributes:
        times: ``(K,)`` tick times (s)
        reference: ``(K, 6)`` reference states
        achieved: ``(K, 6)`` achieved states (world frame velocities)
        commanded_steer, commanded_speed: ``(K, n)`` wheel commands
        achieved_steer, achieved_speed: ``(K, n)`` wheel states after the limits
        flags: ``(K, n)`` direction flags in force
        layout: Wheel layout
        period: Sample period (s)
    """

    times: np.ndarray
    reference: np.ndarray
    achieved: np.ndarray
    commanded_steer: np.ndarray
    commanded_speed: np.ndarray
    achieved_steer: np.ndarray
    achieved_speed: np.ndarray
    flags: np.ndarray
    layout: WheelLayout
    period: float

    def __len__(self) -> int:
        return len(self.times)

    @classmethod
    def empty(cls, layout: WheelLayout, period: float) -> "FollowRecord":
        n = layout.count
        return cls(
            times=np.zeros(0),
            reference=np.zeros((0, 6)),
            achieved=np.zeros((0, 6)),
            commanded_steer=np.zeros((0, n)),
            commanded_speed=np.zeros((0, n)),
            achieved_steer=np.zeros((0, n)),
            achieved_speed=np.zeros((0, n)),
            flags=np.zeros((0, n), dtype=int),
            layout=layout,
            period=period,
        )


class ReferenceSampler:
    """
    Continuous-time reference from trajectory knots.

    ``double_integrator`` replays the held controls exactly (smoothed trajectories);
    ``rigid`` holds the constant body twist joining consecutive knot poses (raw
    search trajectories, whose maneuvers are constant-twist motions). In both modes
    a sample taken at a knot time is that knot's state, and samples at or after the
    end are the final knot.
    """

    def __init__(self, traj: Trajectory, mode: str = DOUBLE_INTEGRATOR):
        if mode not in (DOUBLE_INTEGRATOR, RIGID):
            raise ValueError(f"unknown interpolation mode {mode!r}")
        self.mode = mode
        self.states = traj.states
        self.controls = traj.controls
        self.dts = traj.dts
        self.starts = traj.times
        self.flags = traj.flags
        self.total_time = traj.total_time
        self._twists = None
        if mode == RIGID and len(self.states) > 1:
            self._twists = [
                rigid_twist_between(self.states[h, :3], self.states[h + 1, :3], self.dts[h])
                if self.dts[h] > 0
                else np.zeros(3)
                for h in range(len(self.states) - 1)
            ]

    @property
    def ends_at_rest(self) -> bool:
        return bool(np.all(np.abs(self.states[-1, 3:]) <= _REST))

    def interval(self, t: float) -> int:
        """Index of the interval containing ``t`` (clamped to the last one)."""
        if len(self.states) < 2:
            return 0
        h = int(np.searchsorted(self.starts, t, side="right")) - 1
        return min(max(h, 0), len(self.states) - 2)

    def sample(self, t: float) -> tuple[np.ndarray, int]:
        """
        Reference state at ``t`` and the index of the knot whose flags are in force.

        The index is the interval start, or the last knot once ``t`` reaches the end.
        """
        last = len(self.states) - 1
        if last == 0 or t >= self.total_time - _KNOT_TIME_EPS:
            return self.states[last].copy(), last
        h = self.interval(t)
        tau = min(max(t - self.starts[h], 0.0), self.dts[h])
        if tau <= _KNOT_TIME_EPS:
            return self.states[h].copy(), h
        if self.mode == DOUBLE_INTEGRATOR:
            return rk4_array(self.states[h], self.controls[h], tau), h
        twist = self._twists[h]
        pose = rigid_step(self.states[h, :3], twist, tau)
        return np.concatenate([pose, world_velocity(pose[2], twist)]), h


def rate_limit(current, target, max_step):
    """Move ``current`` toward ``target`` by at most ``max_step`` per element."""
    current = np.asarray(current, dtype=float)
    return current + np.clip(np.asarray(target, dtype=float) - current, -max_step, max_step)


def upcoming_steer(traj: Trajectory, eps: float = 1e-9) -> np.ndarray:
    """
    Per knot and wheel, the steering of the next knot at which the wheel rolls.

    Resting wheels are pre-aligned with it; the last moving steer is kept after the final motion.
    """
    steer = traj.steer
    moving = np.abs(traj.speed) > eps
    upcoming = steer.copy()
    for w in range(steer.shape[1]):
        nxt = None
        for h in range(len(steer) - 1, -1, -1):
            if moving[h, w]:
                nxt = steer[h, w]
            elif nxt is not None:
                upcoming[h, w] = nxt
    return upcoming


def steer_within_limits(steer, speed, lower, upper) -> tuple[np.ndarray, np.ndarray]:
    """
    Wheel commands expressed inside the steering limits.

    A wheel whose command points well outside ``[lower, upper]`` rolls the other
    way (steer + pi, negated speed) when that brings it more than ``_FLIP_MARGIN``
    closer to the range; the result is clipped.
    """
    steer = np.asarray(steer, dtype=float)
    speed = np.asarray(speed, dtype=float)
    flipped = wrap_angle(steer + math.pi)

    def excess(angle):
        return np.maximum(lower - angle, 0.0) + np.maximum(angle - upper, 0.0)

    flip = excess(steer) - excess(flipped) > _FLIP_MARGIN
    steer = np.where(flip, flipped, steer)
    speed = np.where(flip, -speed, speed)
    return np.clip(steer, lower, upper), speed


def fit_body_twist(steer: np.ndarray, speed: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """
    Least-squares rigid body twist ``(vx_b, vy_b, omega)`` for measured wheel velocities.

    Args:
        steer: Body-frame steering per wheel (rad)
        speed: Signed rolling speed per wheel (m/s)
        positions: ``(n, 2)`` wheel positions
    """
    n = len(positions)
    A = np.zeros((2 * n, 3))
    A[0::2, 0] = 1.0
    A[0::2, 2] = -positions[:, 1]
    A[1::2, 1] = 1.0
    A[1::2, 2] = positions[:, 0]
    b = np.empty(2 * n)
    b[0::2] = speed * np.cos(steer)
    b[1::2] = speed * np.sin(steer)
    twist, *_ = np.linalg.lstsq(A, b, rcond=None)
    return twist


def rollout(
    traj: Trajectory,
    config: Optional[FollowerConfig] = None,
    layout: Optional[WheelLayout] = None,
    mode: Optional[str] = None,
) -> FollowRecord:
    """
    Follow ``traj`` with rate- and acceleration-limited wheels.

    The wheels start in the first knot's state (resting wheels pre-aligned with
    their first motion) and every tick, the first included, obeys the limits.

    Args:
        traj: Trajectory to follow
        config: Follower settings
        layout: Layout with the actuation limits (defaults to the trajectory's)
        mode: Reference interpolation; double-integrator unless the trajectory is a
            raw search result (``InitialTrajectory``)

    Returns:
        FollowRecord (empty for an empty trajectory)
    """
    config = config or FollowerConfig()
    layout = layout or traj.layout
    if len(traj) == 0:
        return FollowRecord.empty(layout, config.period)
    if mode is None:
        mode = RIGID if isinstance(traj, InitialTrajectory) else DOUBLE_INTEGRATOR

    sampler = ReferenceSampler(traj, mode)
    period = config.period
    nominal = int(math.floor(sampler.total_time / period + 1e-9)) + 1
    settle = int(math.ceil(config.settle_time / period)) if sampler.ends_at_rest else 0
    positions = layout.positions
    lower, upper = layout.lower, layout.upper
    steer_step = np.asarray(layout.max_steer_rate) * period
    speed_step = np.asarray(layout.max_accel) * period

    upcoming = upcoming_steer(traj)
    pose = traj.states[0, :3].copy()
    steer = upcoming[0].copy()
    speed = traj.speed[0].copy()

    rows: dict[str, list] = {
        "reference": [],
        "achieved": [],
        "cmd_steer": [],
        "cmd_speed": [],
        "steer": [],
        "speed": [],
        "flags": [],
    }
    k = 0
    while k < nominal or (k < nominal + settle and np.any(np.abs(speed) > speed_step)):
        ref, h = sampler.sample(k * period)
        flags = sampler.flags[h]

        error = ref[:2] - pose[:2]
        heading_error = wrap_angle(ref[2] - pose[2])
        v_world = ref[3:5] + config.position_gain * error
        v_body = rotation(pose[2]).T @ v_world
        command = np.array([v_body[0], v_body[1], ref[5] + config.heading_gain * heading_error])
        held = upcoming[min(h + 1, len(upcoming) - 1)]
        c_steer, c_speed = wheel_states(command, positions, flags, held)
        c_steer, c_speed = steer_within_limits(c_steer, c_speed, lower, upper)

        steer = np.clip(rate_limit(steer, c_steer, steer_step), lower, upper)
        speed = rate_limit(speed, c_speed, speed_step)
        twist = fit_body_twist(steer, speed, positions)

        rows["reference"].append(ref)
        rows["achieved"].append(np.concatenate([pose, world_velocity(pose[2], twist)]))
        rows["cmd_steer"].append(c_steer)
        rows["cmd_speed"].append(c_speed)
        rows["steer"].append(steer)
        rows["speed"].append(speed)
        rows["flags"].append(flags)

        pose = rigid_step(pose, twist, period)
        k += 1

    if k > nominal:
        logger.debug(f"Rollout: {k - nominal} settle ticks after the last knot")
    logger.info(f"Rollout: {k} ticks at {period}s ({mode})")
    return FollowRecord(
        times=np.arange(k) * period,
        reference=np.array(rows["reference"]),
        achieved=np.array(rows["achieved"]),
        commanded_steer=np.array(rows["cmd_steer"]),
        commanded_speed=np.array(rows["cmd_speed"]),
        achieved_steer=np.array(rows["steer"]),
        achieved_speed=np.array(rows["speed"]),
        flags=np.array(rows["flags"], dtype=int),
        layout=layout,
        period=period,
    )
