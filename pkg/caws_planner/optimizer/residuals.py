#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Constraint residuals of the smoothing program, evaluated with numpy.

Sign conventions:
- continuity: zero vector when consistent
- steer limit: feasible iff <= 0
- steer rate: feasible iff >= 0
- mode keyframe: feasible iff == 0
"""

import math
from typing import Sequence, Union

import numpy as np

from caws_planner.kinematics.types import BodyControl, BodyState

StateLike = Union[BodyState, Sequence[float], np.ndarray]
ControlLike = Union[BodyControl, Sequence[float], np.ndarray]


def _state_array(x: StateLike) -> np.ndarray:
    return x.as_array() if isinstance(x, BodyState) else np.asarray(x, dtype=float)


def _control_array(u: ControlLike) -> np.ndarray:
    return u.as_array() if isinstance(u, BodyControl) else np.asarray(u, dtype=float)


def dynamics(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``d/dt (x, y, theta, vx, vy, omega) = (vx, vy, omega, ax, ay, alpha)``."""
    return np.concatenate([x[3:6], u])


def rk4_array(x: np.ndarray, u: np.ndarray, dt: float) -> np.ndarray:
    k1 = dynamics(x, u)
    k2 = dynamics(x + 0.5 * dt * k1, u)
    k3 = dynamics(x + 0.5 * dt * k2, u)
    k4 = dynamics(x + dt * k3, u)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(x: StateLike, u: ControlLike, dt: float):
    """
    One RK4 step with the control held constant.

    Exact for the double-integrator dynamics. Returns a BodyState when given one,
    otherwise an array.
    """
    result = rk4_array(_state_array(x), _control_array(u), float(dt))
    return BodyState.from_array(result) if isinstance(x, BodyState) else result


def continuity_residual(x_h: StateLike, u_h: ControlLike, dt_h: float, x_next: StateLike) -> np.ndarray:
    """``x_next - rk4_step(x_h, u_h, dt_h)``."""
    return _state_array(x_next) - rk4_array(_state_array(x_h), _control_array(u_h), float(dt_h))


def _cross(a0, a1, b0, b1):
    return a0 * b1 - a1 * b0


def steer_limit_terms(v, flag: int, steer_lower: float, steer_upper: float):
    """
    The two pieces of the steering-limit test for a body-frame wheel velocity.

    Returns:
        ``(product, halfplane)``: ``(Dv x u_upper)(Dv x u_lower)`` and ``-(Dv . u_mid)``,
        either None when it does not apply to this steering span
    """
    vx, vy = flag * v[0], flag * v[1]
    span = steer_upper - steer_lower
    product = None
    halfplane = None
    if span < math.pi:
        product = _cross(vx, vy, math.cos(steer_upper), math.sin(steer_upper)) * _cross(
            vx, vy, math.cos(steer_lower), math.sin(steer_lower)
        )
    if span <= math.pi:
        mid = 0.5 * (steer_lower + steer_upper)
        halfplane = -(vx * math.cos(mid) + vy * math.sin(mid))
    return product, halfplane


def steer_limit_residual(v: Sequence[float], flag: int, steer_lower: float, steer_upper: float) -> float:
    """
    Steering-limit residual; feasible iff ``<= 0``.

    The product term alone also accepts the cone opposite to the limits, so the
    bisector half-plane is folded in. Spans wider than pi impose nothing.
    """
    product, halfplane = steer_limit_terms(v, flag, steer_lower, steer_upper)
    terms = [t for t in (product, halfplane) if t is not None]
    if not terms:
        return 0.0
    return float(max(terms))


def steer_rate_residual(
    v_t: Sequence[float],
    v_prev: Sequence[float],
    flag_t: int,
    flag_prev: int,
    rate_limit: float,
    dt: float,
) -> float:
    """
    Vector-angle steering-rate residual; feasible iff ``>= 0``.

    ``D_t v_t . D_prev v_prev - |v_t||v_prev| cos(rate_limit * dt)``; zero when either wheel is at rest.
    """
    dot = flag_t * flag_prev * (v_t[0] * v_prev[0] + v_t[1] * v_prev[1])
    norms = math.hypot(v_t[0], v_t[1]) * math.hypot(v_prev[0], v_prev[1])
    return float(dot - norms * math.cos(rate_limit * dt))


def mode_keyframe_residual(speed: float, phase_prev: int, phase_here: int, phase_next: int) -> float:
    """``speed * (|M - M_next| + |M - M_prev|)``; nonzero only at a moving phase boundary."""
    return float(speed * (abs(phase_here - phase_next) + abs(phase_here - phase_prev)))
