"""Rigid-body kinematics: body state to wheel velocity, steering and acceleration."""

from .rigid_body import (
    OMEGA_SINGULAR,
    V_STEER_EPS,
    body_twist,
    body_velocity_from_icm,
    icm_radius,
    omega_matrix,
    rotation,
    steering_halfangle,
    wheel_acceleration,
    wheel_states,
    wheel_velocities_body,
    wheel_velocity,
    wrap_angle,
)
from .types import BodyControl, BodyState, IcmRadius, WheelLayout, WheelMotion

__all__ = [
    "BodyState",
    "BodyControl",
    "WheelLayout",
    "WheelMotion",
    "IcmRadius",
    "OMEGA_SINGULAR",
    "V_STEER_EPS",
    "rotation",
    "omega_matrix",
    "icm_radius",
    "body_velocity_from_icm",
    "steering_halfangle",
    "wheel_velocity",
    "wheel_acceleration",
    "wheel_states",
    "wheel_velocities_body",
    "body_twist",
    "wrap_angle",
]
