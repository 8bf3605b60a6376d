#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Trajectory containers shared by search, optimizer, evaluation and the CLI.

Knot ``h`` carries the duration ``dt`` and control of the interval ``h -> h+1``;
the last knot has ``dt == 0`` and zero control.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from caws_planner.kinematics.rigid_body import body_twist, wheel_states
from caws_planner.kinematics.types import BodyControl, BodyState, WheelLayout


@dataclass(frozen=True)
class TrajectoryKnot:
    """
    One time knot.

    Attributes:
        state: Body state at the knot
        control: Body acceleration held over the following interval
        dt: Duration of the following interval (s); 0 on the last knot
        phase: Manipulation phase id (constant direction flags within a phase)
        flags: Rolling direction per wheel
        steer: Body-frame steering per wheel (rad)
        speed: Signed rolling speed per wheel (m/s)
        keyframe: First or last knot of a phase that borders another phase
    """

    state: BodyState
    control: BodyControl
    dt: float
    phase: int
    flags: tuple[int, ...]
    steer: tuple[float, ...]
    speed: tuple[float, ...]
    keyframe: bool = False


@dataclass(frozen=True)
class Trajectory:
    """Ordered knots plus the layout they were computed for."""

    knots: tuple[TrajectoryKnot, ...]
    layout: WheelLayout

    def __len__(self) -> int:
        return len(self.knots)

    @property
    def total_time(self) -> float:
        return float(sum(k.dt for k in self.knots))

    @property
    def states(self) -> np.ndarray:
        """``(H, 6)`` array of ``(x, y, theta, vx, vy, omega)``."""
        return np.array([k.state.as_array() for k in self.knots]).reshape(-1, 6)

    @property
    def controls(self) -> np.ndarray:
        return np.array([k.control.as_array() for k in self.knots]).reshape(-1, 3)

    @property
    def dts(self) -> np.ndarray:
        return np.array([k.dt for k in self.knots], dtype=float)

    @property
    def times(self) -> np.ndarray:
        """Knot time stamps starting at 0."""
        return np.concatenate([[0.0], np.cumsum(self.dts)[:-1]]) if self.knots else np.zeros(0)

    @property
    def phases(self) -> np.ndarray:
        return np.array([k.phase for k in self.knots], dtype=int)

    @property
    def flags(self) -> np.ndarray:
        return np.array([k.flags for k in self.knots], dtype=int).reshape(-1, self.layout.count)

    @property
    def steer(self) -> np.ndarray:
        return np.array([k.steer for k in self.knots], dtype=float).reshape(-1, self.layout.count)

    @property
    def speed(self) -> np.ndarray:
        return np.array([k.speed for k in self.knots], dtype=float).reshape(-1, self.layout.count)


@dataclass(frozen=True)
class InitialTrajectory(Trajectory):
    """Search output used as the optimizer's warm start and reference."""

    nodes_expanded: int = 0


def keyframe_mask(phases: Sequence[int]) -> np.ndarray:
    """Knots whose phase differs from a neighbor's."""
    phases = np.asarray(phases, dtype=int)
    mask = np.zeros(len(phases), dtype=bool)
    if len(phases) > 1:
        change = phases[1:] != phases[:-1]
        mask[:-1] |= change
        mask[1:] |= change
    return mask


def wheel_fields(
    states: np.ndarray, flags: np.ndarray, layout: WheelLayout
) -> tuple[np.ndarray, np.ndarray]:
    """
    Steering and signed speed of every wheel at every knot, from the body states.

    Wheels at rest hold the previous knot's steering.

    Returns:
        ``(steer, speed)``, each ``(H, n)``
    """
    states = np.asarray(states, dtype=float).reshape(-1, 6)
    steer = np.zeros((len(states), layout.count))
    speed = np.zeros((len(states), layout.count))
    previous: Optional[np.ndarray] = None
    for h, row in enumerate(states):
        twist = body_twist(BodyState.from_array(row))
        steer[h], speed[h] = wheel_states(twist, layout.positions, flags[h], previous)
        previous = steer[h]
    return steer, speed


def build_knots(
    states: np.ndarray,
    controls: np.ndarray,
    dts: np.ndarray,
    phases: Sequence[int],
    flags: np.ndarray,
    layout: WheelLayout,
    steer: Optional[np.ndarray] = None,
    speed: Optional[np.ndarray] = None,
) -> tuple[TrajectoryKnot, ...]:
    """Assemble knots from arrays; wheel fields are recomputed from the states when omitted."""
    flags = np.asarray(flags, dtype=int).reshape(len(states), layout.count)
    if steer is None or speed is None:
        steer, speed = wheel_fields(states, flags, layout)
    keyframes = keyframe_mask(phases)
    return tuple(
        TrajectoryKnot(
            state=BodyState.from_array(states[h]),
            control=BodyControl.from_array(controls[h]),
            dt=float(dts[h]),
            phase=int(phases[h]),
            flags=tuple(int(f) for f in flags[h]),
            steer=tuple(float(v) for v in steer[h]),
            speed=tuple(float(v) for v in speed[h]),
            keyframe=bool(keyframes[h]),
        )
        for h in range(len(states))
    )


def finite_difference_controls(states: np.ndarray, dts: np.ndarray) -> np.ndarray:
    """Controls ``(v[h+1] - v[h]) / dt[h]`` with a zero control on the last knot."""
    states = np.asarray(states, dtype=float)
    controls = np.zeros((len(states), 3))
    if len(states) > 1:
        dt = np.asarray(dts[:-1], dtype=float)
        controls[:-1] = (states[1:, 3:] - states[:-1, 3:]) / dt[:, None]
    return controls


def reversed_trajectory(traj: Trajectory) -> Trajectory:
    """
    The same path driven backwards in time.

    Velocities flip sign, accelerations are unchanged, and direction flags flip
    so every wheel keeps its steering angle.
    """
    knots = traj.knots[::-1]
    if not knots:
        return traj
    states = np.array([k.state.as_array() for k in knots])
    states[:, 3:] *= -1.0
    dts = np.concatenate([[k.dt for k in knots[1:]], [0.0]])
    controls = np.array([k.control.as_array() for k in traj.knots[:-1]])[::-1]
    controls = np.vstack([controls.reshape(-1, 3), np.zeros((1, 3))])
    flags = -np.array([k.flags for k in knots], dtype=int)
    steer = np.array([k.steer for k in knots])
    speed = -np.array([k.speed for k in knots])
    phases = [knots[0].phase - k.phase for k in knots]
    new_knots = build_knots(states, controls, dts, phases, flags, traj.layout, steer, speed)
    return replace(traj, knots=new_knots)
