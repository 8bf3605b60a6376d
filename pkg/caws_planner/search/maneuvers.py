#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Maneuvers: constant body-twist motions between search nodes.

A maneuver holding the body twist ``(vx_b, vy_b, omega)`` constant is an exact
rotation about a body-fixed ICM (or a translation when ``omega == 0``), so poses
are propagated in closed form and wheel steering stays constant along it.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from caws_planner.kinematics.rigid_body import J, wheel_velocities_body, wrap_angle
from caws_planner.kinematics.types import BodyState, WheelLayout
from caws_planner.search.sampling import IcmSampleSet, resolve_wheels
from caws_planner.world.grid import Footprint, sample_count

logger = logging.getLogger(__name__)

_SMALL_ANGLE = 1e-6


def _arc_factors(omega, duration):
    """``(sin(w T) / w, (1 - cos(w T)) / w)`` with a series near ``w = 0``."""
    omega = np.asarray(omega, dtype=float)
    duration = np.asarray(duration, dtype=float)
    angle = omega * duration
    small = np.abs(angle) < _SMALL_ANGLE
    safe = np.where(small, 1.0, omega)
    a = np.where(small, duration * (1.0 - angle**2 / 6.0), np.sin(angle) / safe)
    b = np.where(small, duration * (angle / 2.0 - angle**3 / 24.0), (1.0 - np.cos(angle)) / safe)
    return a, b


def rigid_step(pose, twist, duration):
    """
    Pose after holding a body-frame twist for ``duration``.

    Broadcasts over leading dimensions of ``pose`` (``(..., 3)``), ``twist`` (``(..., 3)``)
    and ``duration``. Headings are not wrapped.
    """
    pose = np.asarray(pose, dtype=float)
    twist = np.asarray(twist, dtype=float)
    vx, vy, omega = twist[..., 0], twist[..., 1], twist[..., 2]
    a, b = _arc_factors(omega, duration)
    dx = a * vx - b * vy
    dy = b * vx + a * vy
    theta = pose[..., 2]
    c, s = np.cos(theta), np.sin(theta)
    return np.stack(
        [pose[..., 0] + c * dx - s * dy, pose[..., 1] + s * dx + c * dy, theta + omega * duration],
        axis=-1,
    )


def rigid_twist_between(pose_a: Sequence[float], pose_b: Sequence[float], duration: float) -> np.ndarray:
    """
    Constant body twist carrying ``pose_a`` to ``pose_b`` in ``duration``.

    Inverse of ``rigid_step``; the heading change is taken unwrapped.
    """
    x0, y0, th0 = (float(v) for v in pose_a)
    x1, y1, th1 = (float(v) for v in pose_b)
    c, s = math.cos(th0), math.sin(th0)
    dx = c * (x1 - x0) + s * (y1 - y0)
    dy = -s * (x1 - x0) + c * (y1 - y0)
    omega = (th1 - th0) / duration
    a, b = _arc_factors(omega, duration)
    a, b = float(a), float(b)
    det = a * a + b * b
    vx = (a * dx + b * dy) / det
    vy = (-b * dx + a * dy) / det
    return np.array([vx, vy, omega])


def world_velocity(theta, twist) -> np.ndarray:
    """World-frame ``(vx, vy, omega)`` of a body twist at heading ``theta``."""
    twist = np.asarray(twist, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack(
        [c * twist[..., 0] - s * twist[..., 1], s * twist[..., 0] + c * twist[..., 1], twist[..., 2]],
        axis=-1,
    )


@dataclass(frozen=True)
class Maneuver:
    """
    One constant-twist motion primitive.

    Attributes:
        r: ICM radius (ICM to control center, body frame), None for a translation
        omega: Yaw rate (rad/s)
        twist: Body-frame twist ``(vx_b, vy_b, omega)``
        duration: Time the twist is held (s)
        delta_pose: Body-frame displacement ``(dx, dy, dtheta)``
        end_velocity: World velocity ``(vx, vy, omega)`` when starting at heading 0
        wheel_steer: Body-frame steering per wheel (rad)
        wheel_speed: Signed rolling speed per wheel (m/s)
        direction_flags: Rolling direction per wheel
    """

    r: Optional[np.ndarray]
    omega: float
    twist: np.ndarray
    duration: float
    delta_pose: np.ndarray
    end_velocity: np.ndarray
    wheel_steer: np.ndarray
    wheel_speed: np.ndarray
    direction_flags: np.ndarray

    @property
    def arc_length(self) -> float:
        """Distance traveled by the control center."""
        return math.hypot(self.twist[0], self.twist[1]) * self.duration

    @classmethod
    def from_twist(
        cls, twist: Sequence[float], duration: float, layout: WheelLayout
    ) -> Optional["Maneuver"]:
        """Build a maneuver, or None if the steering limits cannot realize ``twist``."""
        twist = np.asarray(twist, dtype=float)
        resolved = resolve_wheels(twist, layout)
        if resolved is None:
            return None
        steer, flags = resolved
        v = wheel_velocities_body(twist, layout.positions)
        speed = flags * np.hypot(v[:, 0], v[:, 1])
        omega = float(twist[2])
        r = None if omega == 0.0 else -(J @ twist[:2]) / omega
        return cls(
            r=r,
            omega=omega,
            twist=twist,
            duration=float(duration),
            delta_pose=rigid_step(np.zeros(3), twist, duration),
            end_velocity=world_velocity(omega * duration, twist),
            wheel_steer=steer,
            wheel_speed=speed,
            direction_flags=flags,
        )


def forward_simulate(
    state: BodyState, r: Optional[Sequence[float]], omega: float, duration: float, layout: WheelLayout,
    translation: Optional[Sequence[float]] = None,
) -> tuple[Maneuver, BodyState]:
    """
    Rotate ``state`` about its ICM at ``r`` for ``duration`` seconds.

    Args:
        state: Current body state (only the pose is used)
        r: ICM radius, body frame; None together with ``translation`` for a pure translation
        omega: Yaw rate (rad/s)
        duration: Time (s)
        layout: Wheel layout for the wheel steering and flags
        translation: Body-frame velocity of a pure translation

    Returns:
        ``(maneuver, successor)``; the successor velocity is the maneuver's world velocity

    Raises:
        ValueError: The maneuver violates a steering limit
    """
    if r is None:
        if translation is None:
            raise ValueError("either r or translation is required")
        twist = np.array([translation[0], translation[1], 0.0])
    else:
        r = np.asarray(r, dtype=float)
        twist = np.array([-omega * r[1], omega * r[0], omega])
    maneuver = Maneuver.from_twist(twist, duration, layout)
    if maneuver is None:
        raise ValueError(f"twist {twist.tolist()} violates the steering limits")
    pose = rigid_step(np.array(state.pose), twist, duration)
    velocity = world_velocity(pose[2], twist)
    return maneuver, BodyState(*pose, *velocity)


# ============================================
# Maneuver library
# ============================================


def _speed_scale(twist: np.ndarray, layout: WheelLayout, max_speed: float, max_yaw_rate: float) -> float:
    """Largest factor <= 1 keeping body speed, yaw rate and every wheel speed within limits."""
    scale = 1.0
    speed = math.hypot(twist[0], twist[1])
    if speed > max_speed:
        scale = min(scale, max_speed / speed)
    if abs(twist[2]) > max_yaw_rate:
        scale = min(scale, max_yaw_rate / abs(twist[2]))
    v = wheel_velocities_body(twist, layout.positions)
    wheel = np.hypot(v[:, 0], v[:, 1])
    limits = np.asarray(layout.max_speed)
    over = wheel > limits
    if np.any(over):
        scale = min(scale, float(np.min(limits[over] / wheel[over])))
    return scale


@dataclass(frozen=True)
class ManeuverLibrary:
    """
    Feasible maneuvers from a sample set, stacked into arrays for vectorized expansion.

    ``sweep`` holds body-frame intermediate poses, shape ``(m, k, 3)``, the last
    one being the end pose.
    """

    maneuvers: tuple[Maneuver, ...]
    twists: np.ndarray
    durations: np.ndarray
    deltas: np.ndarray
    arc_lengths: np.ndarray
    steer: np.ndarray
    speed: np.ndarray
    flags: np.ndarray
    sweep: np.ndarray

    def __len__(self) -> int:
        return len(self.maneuvers)

    @classmethod
    def build(
        cls,
        samples: IcmSampleSet,
        layout: WheelLayout,
        footprint: Footprint,
        resolution: float,
        max_speed: float,
        max_yaw_rate: float,
        max_step_duration: float,
    ) -> "ManeuverLibrary":
        """
        Scale, filter and deduplicate every sampled ``(r, omega)``.

        Zero yaw-rate samples become translations at full speed along both
        perpendiculars of ``r``.
        """
        _, _, radii = samples.radii()
        candidates: list[np.ndarray] = []
        for r in radii:
            for omega in samples.omega_values:
                if omega == 0.0:
                    norm = math.hypot(r[0], r[1])
                    if norm == 0.0:
                        continue
                    direction = J @ r / norm
                    candidates.append(np.array([direction[0], direction[1], 0.0]) * max_speed)
                    candidates.append(np.array([-direction[0], -direction[1], 0.0]) * max_speed)
                else:
                    candidates.append(np.array([-omega * r[1], omega * r[0], omega]))

        maneuvers: list[Maneuver] = []
        seen: set[tuple[float, float, float]] = set()
        infeasible = 0
        for twist in candidates:
            twist = twist * _speed_scale(twist, layout, max_speed, max_yaw_rate)
            key = tuple(np.round(twist, 9).tolist())
            if key in seen:
                continue
            seen.add(key)
            speed = math.hypot(twist[0], twist[1])
            duration = max_step_duration
            if speed > 0:
                duration = min(samples.arc_length_cap / speed, max_step_duration)
            maneuver = Maneuver.from_twist(twist, duration, layout)
            if maneuver is None:
                infeasible += 1
                continue
            maneuvers.append(maneuver)

        if not maneuvers:
            logger.warning("No sampled maneuver satisfies the steering limits")
        logger.debug(
            f"Maneuver library: {len(maneuvers)} feasible, {infeasible} infeasible, "
            f"{len(candidates) - len(seen)} duplicates"
        )

        n = layout.count
        arcs = np.array([m.arc_length for m in maneuvers])
        counts = [
            sample_count(footprint, m.arc_length, m.delta_pose[2], resolution) for m in maneuvers
        ]
        k = max(counts) if counts else 1
        fractions = np.arange(1, k + 1, dtype=float) / k
        sweep = np.zeros((len(maneuvers), k, 3))
        for i, m in enumerate(maneuvers):
            sweep[i] = rigid_step(np.zeros(3), m.twist, fractions * m.duration)
        return cls(
            maneuvers=tuple(maneuvers),
            twists=np.array([m.twist for m in maneuvers]).reshape(-1, 3),
            durations=np.array([m.duration for m in maneuvers]),
            deltas=np.array([m.delta_pose for m in maneuvers]).reshape(-1, 3),
            arc_lengths=arcs,
            steer=np.array([m.wheel_steer for m in maneuvers]).reshape(-1, n),
            speed=np.array([m.wheel_speed for m in maneuvers]).reshape(-1, n),
            flags=np.array([m.direction_flags for m in maneuvers], dtype=int).reshape(-1, n),
            sweep=sweep,
        )


def compose(pose: Sequence[float], relative: np.ndarray) -> np.ndarray:
    """World poses of body-frame poses ``relative`` (``(..., 3)``) taken from ``pose``."""
    x, y, theta = (float(v) for v in pose)
    c, s = math.cos(theta), math.sin(theta)
    return np.stack(
        [
            x + c * relative[..., 0] - s * relative[..., 1],
            y + s * relative[..., 0] + c * relative[..., 1],
            theta + relative[..., 2],
        ],
        axis=-1,
    )


# ============================================
# Analytic goal shot
# ============================================


@dataclass(frozen=True)
class GoalShot:
    """Constant-twist motion straight onto the goal pose, split into maneuvers."""

    maneuvers: tuple[Maneuver, ...]
    poses: np.ndarray  # (n, 3) end pose of each piece, unwrapped heading
    sweep: np.ndarray  # (k, 3) collision samples along the whole shot


def goal_shot(
    pose: Sequence[float],
    goal_pose: Sequence[float],
    layout: WheelLayout,
    footprint: Footprint,
    resolution: float,
    max_speed: float,
    max_yaw_rate: float,
    arc_length_cap: float,
    max_step_duration: float,
) -> Optional[GoalShot]:
    """
    The single rigid motion from ``pose`` to ``goal_pose``, if the steering limits allow it.

    With a heading change the motion is a rotation about the fixed point of the
    displacement; otherwise a translation. Its duration respects body speed, yaw
    rate and every wheel speed limit.

    Returns:
        GoalShot, or None when the motion is not steerable or there is nothing to do
    """
    x, y, theta = (float(v) for v in pose)
    dtheta = wrap_angle(float(goal_pose[2]) - theta)
    c, s = math.cos(theta), math.sin(theta)
    gx, gy = float(goal_pose[0]) - x, float(goal_pose[1]) - y
    d = np.array([c * gx + s * gy, -s * gx + c * gy])
    distance = float(np.hypot(*d))
    positions = layout.positions
    wheel_limits = np.asarray(layout.max_speed)

    if abs(dtheta) < 1e-9:
        if distance < 1e-12:
            return None
        direction = d / distance
        unit_twist = np.array([direction[0], direction[1], 0.0])
        arc = distance
        wheel_time = distance / float(np.min(wheel_limits))
        total_time = max(arc / max_speed, wheel_time)
    else:
        rot = np.array([[math.cos(dtheta), -math.sin(dtheta)], [math.sin(dtheta), math.cos(dtheta)]])
        fixed = np.linalg.solve(np.eye(2) - rot, d)
        r = -fixed
        sign = 1.0 if dtheta > 0 else -1.0
        unit_twist = np.array([-sign * r[1], sign * r[0], sign])
        arc = abs(dtheta) * float(np.hypot(*r))
        wheel_radii = np.hypot(r[0] + positions[:, 0], r[1] + positions[:, 1])
        wheel_time = float(np.max(abs(dtheta) * wheel_radii / wheel_limits))
        total_time = max(arc / max_speed, abs(dtheta) / max_yaw_rate, wheel_time)

    if resolve_wheels(unit_twist, layout) is None:
        return None

    pieces = max(
        1,
        math.ceil(arc / arc_length_cap - 1e-9),
        math.ceil(total_time / max_step_duration - 1e-9),
        math.ceil(abs(dtheta) / (math.pi / 4) - 1e-9),
    )
    piece_time = total_time / pieces
    if abs(dtheta) < 1e-9:
        twist = unit_twist * (distance / total_time)
    else:
        twist = unit_twist * (abs(dtheta) / total_time)
    maneuver = Maneuver.from_twist(twist, piece_time, layout)
    if maneuver is None:
        return None

    times = piece_time * np.arange(1, pieces + 1)
    poses = rigid_step(np.array([x, y, theta]), twist, times)
    poses[-1] = (float(goal_pose[0]), float(goal_pose[1]), theta + dtheta)

    k = sample_count(footprint, arc, dtheta, resolution)
    sweep = rigid_step(np.array([x, y, theta]), twist, total_time * np.arange(1, k + 1) / k)
    return GoalShot(maneuvers=(maneuver,) * pieces, poses=poses, sweep=sweep)
