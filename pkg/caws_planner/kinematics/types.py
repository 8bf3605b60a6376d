#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""Kinematic value types: body state, body control, wheel layout and wheel motion."""

import math
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from caws_planner.errors import ValidationError


def _require_finite(obj: object, name: str) -> None:
    for f in fields(obj):  # type: ignore[arg-type]
        value = getattr(obj, f.name)
        if not math.isfinite(value):
            raise ValidationError(f"{name}.{f.name}", f"must be finite, got {value!r}")


@dataclass(frozen=True)
class BodyState:
    """
    World-frame pose and its time derivatives.

    ``theta`` is kept unwrapped so heading differences along a trajectory stay continuous.
    """

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        _require_finite(self, "state")

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "BodyState":
        """Build from ``(x, y, theta, vx, vy, omega)``."""
        return cls(*(float(v) for v in values))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta, self.vx, self.vy, self.omega])

    @property
    def pose(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    @property
    def velocity(self) -> np.ndarray:
        """Translational world-frame velocity ``(vx, vy)``."""
        return np.array([self.vx, self.vy])

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


@dataclass(frozen=True)
class BodyControl:
    """Body accelerations ``(ax, ay, alpha)`` in the world frame."""

    ax: float = 0.0
    ay: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        _require_finite(self, "control")

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "BodyControl":
        return cls(*(float(v) for v in values))

    def as_array(self) -> np.ndarray:
        return np.array([self.ax, self.ay, self.alpha])


@dataclass(frozen=True)
class WheelLayout:
    """
    Wheel positions in the body frame and per-wheel actuation limits.

    The layout origin is the control center. Steering bounds are radians in (-pi, pi].

    Attributes:
        wheels: Wheel contact points ``(x, y)`` relative to the control center (m)
        steer_lower: Lower steering bound per wheel (rad)
        steer_upper: Upper steering bound per wheel (rad)
        max_speed: Max wheel rolling speed per wheel (m/s)
        max_accel: Max wheel acceleration per wheel (m/s^2)
        max_steer_rate: Max steering rate per wheel (rad/s)
    """

    wheels: tuple[tuple[float, float], ...]
    steer_lower: tuple[float, ...]
    steer_upper: tuple[float, ...]
    max_speed: tuple[float, ...]
    max_accel: tuple[float, ...]
    max_steer_rate: tuple[float, ...]

    def __post_init__(self):
        n = len(self.wheels)
        if n < 1:
            raise ValidationError("robot.wheels", "at least one wheel is required")
        for name in ("steer_lower", "steer_upper", "max_speed", "max_accel", "max_steer_rate"):
            if len(getattr(self, name)) != n:
                raise ValidationError(
                    f"robot.{name}", f"expected {n} values (one per wheel), got {len(getattr(self, name))}"
                )
        for i, (lo, hi) in enumerate(zip(self.steer_lower, self.steer_upper)):
            if not (-math.pi < lo <= math.pi and -math.pi < hi <= math.pi):
                raise ValidationError(f"robot.steer_lower[{i}]", "steering bounds must lie in (-180, 180] deg")
            if lo >= hi:
                raise ValidationError(
                    f"robot.steer_lower[{i}]", f"lower bound {lo:.6g} must be below upper bound {hi:.6g}"
                )
        for name in ("max_speed", "max_accel", "max_steer_rate"):
            for i, value in enumerate(getattr(self, name)):
                if not value > 0:
                    raise ValidationError(f"robot.{name}[{i}]", "must be positive")
        if len(set(self.wheels)) != n:
            raise ValidationError("robot.wheels", "wheel positions must be distinct")

    @classmethod
    def uniform(
        cls,
        wheels: Sequence[Sequence[float]],
        steer_lower: Sequence[float],
        steer_upper: Sequence[float],
        max_speed: float,
        max_accel: float,
        max_steer_rate: float,
    ) -> "WheelLayout":
        """Layout whose actuation limits are shared by every wheel."""
        n = len(wheels)
        return cls(
            wheels=tuple((float(w[0]), float(w[1])) for w in wheels),
            steer_lower=tuple(float(v) for v in steer_lower),
            steer_upper=tuple(float(v) for v in steer_upper),
            max_speed=(float(max_speed),) * n,
            max_accel=(float(max_accel),) * n,
            max_steer_rate=(float(max_steer_rate),) * n,
        )

    @property
    def count(self) -> int:
        return len(self.wheels)

    @property
    def positions(self) -> np.ndarray:
        """Wheel positions as an ``(n, 2)`` array."""
        return np.asarray(self.wheels, dtype=float)

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.steer_lower, dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.steer_upper, dtype=float)


@dataclass(frozen=True)
class WheelMotion:
    """
    Velocity and steering of one wheel contact point.

    Attributes:
        v_world: Contact-point velocity, world frame (m/s)
        v_body: Same velocity in the robot frame (m/s)
        steer_world: Steering angle in the world frame (rad)
        steer_body: Steering angle relative to the body, wrapped to (-pi, pi] (rad)
        speed: Rolling speed, signed by the direction flag (m/s)
        steer_defined: False when the wheel is (nearly) at rest and the steer
            fields carry the held/neutral angle instead of a measured one
    """

    v_world: np.ndarray
    v_body: np.ndarray
    steer_world: float
    steer_body: float
    speed: float
    steer_defined: bool = True


@dataclass(frozen=True)
class IcmRadius:
    """Vector from the instantaneous center of motion to the control center, body frame (m)."""

    r: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.hypot(self.r[0], self.r[1]))
