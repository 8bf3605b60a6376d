#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Planar rigid-body kinematics for all-wheel-steering chassis.

Conventions:
- ``R(theta)`` rotates body-frame vectors into the world frame.
- ``K(theta) = dR/dtheta``; the world-frame velocity of a body point ``w`` is ``v + K(theta) * omega * w``.
- ``J = [[0, -1], [1, 0]]`` so that ``R(theta)^T K(theta) = J``.
- The ICM radius ``r`` points from the instantaneous center of motion to the control center,
  expressed in the body frame.
"""

import math
from typing import Optional, Sequence

import numpy as np

from caws_planner.errors import DegenerateBackward, SingularIcm
from caws_planner.kinematics.types import BodyControl, BodyState, IcmRadius, WheelMotion

OMEGA_SINGULAR = 1e-6  # rad/s
V_STEER_EPS = 1e-9  # m/s

J = np.array([[0.0, -1.0], [1.0, 0.0]])


def wrap_angle(angle):
    """Wrap an angle (or array of angles) to (-pi, pi]."""
    wrapped = math.pi - np.mod(math.pi - np.asarray(angle, dtype=float), 2.0 * math.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def rotation(theta: float) -> np.ndarray:
    """Rotation matrix ``R(theta)`` in SO(2)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def omega_matrix(theta: float, omega: float) -> np.ndarray:
    """Time derivative of ``R(theta)``: ``K(theta) * omega``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[-s, -c], [c, -s]]) * omega


def icm_radius(state: BodyState, omega_singular: float = OMEGA_SINGULAR) -> IcmRadius:
    """
    ICM radius vector of the current motion.

    Args:
        state: Body state
        omega_singular: Yaw-rate magnitude below which the ICM is at infinity

    Returns:
        IcmRadius with ``omega_matrix(theta, omega) @ r == (vx, vy)``

    Raises:
        SingularIcm: If ``|omega| < omega_singular`` (pure translation)
    """
    if abs(state.omega) < omega_singular:
        raise SingularIcm(
            f"|omega|={abs(state.omega):.3e} below {omega_singular:.1e}; ICM at infinity",
            omega=state.omega,
        )
    c, s = math.cos(state.theta), math.sin(state.theta)
    k_t = np.array([[-s, c], [-c, -s]])  # K(theta)^T
    return IcmRadius(r=k_t @ (state.velocity / state.omega))


def body_velocity_from_icm(r: IcmRadius, omega: float, theta: float) -> np.ndarray:
    """World-frame control-center velocity for rotation ``omega`` about the ICM at ``r``."""
    return omega_matrix(theta, omega) @ np.asarray(r.r, dtype=float)


def steering_halfangle(v: Sequence[float]) -> float:
    """
    Steering angle via the half-angle form ``2 atan(vy / (|v| + vx))``.

    Raises:
        DegenerateBackward: If ``vx == -|v|`` (velocity along -x, or zero)
    """
    vx, vy = float(v[0]), float(v[1])
    denominator = math.hypot(vx, vy) + vx
    if denominator == 0.0:
        raise DegenerateBackward("half-angle steering undefined for velocity along -x", vx=vx, vy=vy)
    return 2.0 * math.atan(vy / denominator)


def wheel_velocity(
    state: BodyState,
    w: Sequence[float],
    direction: Optional[int] = None,
    previous_steer: Optional[float] = None,
    v_steer_eps: float = V_STEER_EPS,
) -> WheelMotion:
    """
    Velocity and steering angle of the wheel mounted at body point ``w``.

    Args:
        state: Body state
        w: Wheel position in the body frame (m)
        direction: Rolling direction flag (+1/-1); a backward-rolling wheel points
            opposite to its contact velocity and reports a negative speed
        previous_steer: Body-frame steering held while the wheel is at rest (default 0)
        v_steer_eps: Speed below which the steering angle is undefined

    Returns:
        WheelMotion for the wheel
    """
    w = np.asarray(w, dtype=float)
    v_world = state.velocity + omega_matrix(state.theta, state.omega) @ w
    v_body = rotation(state.theta).T @ v_world
    sign = 1.0 if direction is None else float(direction)
    norm = float(np.hypot(v_body[0], v_body[1]))

    if norm <= v_steer_eps:
        steer_body = 0.0 if previous_steer is None else float(previous_steer)
        return WheelMotion(
            v_world=v_world,
            v_body=v_body,
            steer_world=wrap_angle(steer_body + state.theta),
            steer_body=steer_body,
            speed=sign * norm,
            steer_defined=False,
        )

    steer_world = math.atan2(sign * v_world[1], sign * v_world[0])
    return WheelMotion(
        v_world=v_world,
        v_body=v_body,
        steer_world=steer_world,
        steer_body=wrap_angle(steer_world - state.theta),
        speed=sign * norm,
    )


def wheel_acceleration(state: BodyState, control: BodyControl, w: Sequence[float]) -> np.ndarray:
    """
    Time derivative of the world-frame wheel velocity.

    ``a + dK/dt * omega * w + K * alpha * w`` with ``dK/dtheta = -R(theta)``.
    """
    w = np.asarray(w, dtype=float)
    centripetal = -rotation(state.theta) @ w * state.omega**2
    tangential = omega_matrix(state.theta, control.alpha) @ w
    return control.as_array()[:2] + centripetal + tangential


def body_twist(state: BodyState) -> np.ndarray:
    """Body-frame twist ``(vx_b, vy_b, omega)``."""
    vb = rotation(state.theta).T @ state.velocity
    return np.array([vb[0], vb[1], state.omega])


def wheel_velocities_body(twist: Sequence[float], positions: np.ndarray) -> np.ndarray:
    """
    Body-frame contact velocities of all wheels for a body-frame twist.

    Args:
        twist: ``(vx_b, vy_b, omega)``
        positions: ``(n, 2)`` wheel positions

    Returns:
        ``(n, 2)`` array of wheel velocities
    """
    vx, vy, omega = twist
    positions = np.asarray(positions, dtype=float)
    return np.column_stack([vx - omega * positions[:, 1], vy + omega * positions[:, 0]])


def wheel_states(
    twist: Sequence[float],
    positions: np.ndarray,
    flags: Sequence[int],
    previous_steer: Optional[np.ndarray] = None,
    v_steer_eps: float = V_STEER_EPS,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Body-frame steering angles and signed speeds of every wheel.

    Wheels below ``v_steer_eps`` hold ``previous_steer`` (or 0).

    Returns:
        ``(steer, speed)`` arrays of shape ``(n,)``
    """
    flags = np.asarray(flags, dtype=float)
    v = wheel_velocities_body(twist, positions) * flags[:, None]
    norm = np.hypot(v[:, 0], v[:, 1])
    held = np.zeros(len(norm)) if previous_steer is None else np.asarray(previous_steer, dtype=float)
    steer = np.where(norm > v_steer_eps, np.arctan2(v[:, 1], v[:, 0]), held)
    return wrap_angle(steer), flags * norm
