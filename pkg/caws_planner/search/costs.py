#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Time-denominated search costs.

Every term is a time so wheel actuation and body motion compare directly:

- wheel speed change over wheel acceleration limit
- wheel steering change over steering rate limit
- traveled distance over body speed limit, heading change over yaw-rate limit
"""

import math
from typing import Sequence

import numpy as np

from caws_planner.kinematics.rigid_body import wrap_angle
from caws_planner.kinematics.types import WheelLayout
from caws_planner.search.sampling import steer_error


def time_costs(
    prev_steer: np.ndarray,
    prev_speed: np.ndarray,
    next_steer: np.ndarray,
    next_speed: np.ndarray,
    distance,
    dtheta,
    layout: WheelLayout,
    max_speed: float,
    max_yaw_rate: float,
    k_vw: float = 1.0,
    k_dw: float = 1.0,
) -> np.ndarray:
    """
    Step cost for one or many successors at once.

    Args:
        prev_steer, prev_speed: Wheel state of the expanded node, shape ``(n,)``
        next_steer, next_speed: Wheel states of the successors, shape ``(m, n)`` or ``(n,)``
        distance: Control-center travel per successor (m)
        dtheta: Heading change per successor (rad)
        layout: Wheel layout (acceleration and steering-rate limits)
        max_speed: Body speed limit (m/s)
        max_yaw_rate: Yaw-rate limit (rad/s)
        k_vw: Weight of the wheel speed term
        k_dw: Weight of the wheel steering term

    Returns:
        ``max(t_w, t_body)`` per successor (s)
    """
    next_steer = np.atleast_2d(next_steer)
    next_speed = np.atleast_2d(next_speed)
    t_vw = np.max(np.abs(next_speed - prev_speed) / np.asarray(layout.max_accel), axis=1)
    t_dw = np.max(steer_error(next_steer, prev_steer) / np.asarray(layout.max_steer_rate), axis=1)
    t_w = np.sqrt(k_vw * t_vw**2 + k_dw * t_dw**2)
    t_body = np.maximum(np.abs(distance) / max_speed, np.abs(dtheta) / max_yaw_rate)
    return np.maximum(t_w, t_body)


def step_cost(prev, nxt, layout: WheelLayout, limits, weights, distance=None) -> float:
    """
    Time cost of moving between two search nodes.

    Args:
        prev: Node being expanded
        nxt: Successor node
        layout: Wheel layout
        limits: Body limits (``max_speed``, ``max_yaw_rate``)
        weights: Search weights (``k_vw``, ``k_dw``)
        distance: Traveled arc length; the straight-line distance when omitted

    Returns:
        Cost in seconds
    """
    if distance is None:
        distance = math.hypot(nxt.pose[0] - prev.pose[0], nxt.pose[1] - prev.pose[1])
    dtheta = nxt.pose[2] - prev.pose[2]
    cost = time_costs(
        np.asarray(prev.wheel_steer),
        np.asarray(prev.wheel_speed),
        np.asarray(nxt.wheel_steer),
        np.asarray(nxt.wheel_speed),
        distance,
        dtheta,
        layout,
        limits.max_speed,
        limits.max_yaw_rate,
        weights.k_vw,
        weights.k_dw,
    )
    return float(cost[0])


def heuristic(pose: Sequence[float], goal: Sequence[float], limits, k_h: float = 1.0):
    """
    Time-to-go estimate ``k_h * max(distance / v_max, |wrapped heading error| / yaw_rate_max)``.

    ``pose`` may be a single ``(x, y, theta)`` or an ``(m, 3)`` array.
    """
    pose = np.asarray(pose, dtype=float)
    dist = np.hypot(pose[..., 0] - goal[0], pose[..., 1] - goal[1])
    dtheta = np.abs(wrap_angle(goal[2] - pose[..., 2]))
    h = k_h * np.maximum(dist / limits.max_speed, dtheta / limits.max_yaw_rate)
    if np.ndim(h) == 0:
        return float(h)
    return h
