#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Chassis presets.

- ``four_wheel_layout``: constrained all-wheel steering, independent front/rear limits
- ``omni_layout``: every wheel limited to +-90 deg, full freedom with direction flags
- ``bicycle_layout``: rear wheels locked straight, control center on the rear axle
"""

import math

from caws_planner.kinematics.types import WheelLayout


def four_wheel_layout(
    half_wheelbase: float = 0.5,
    half_track: float = 0.4,
    front_limit_deg: float = 90.0,
    rear_limit_deg: float = 75.0,
    max_wheel_speed: float = 1.5,
    max_wheel_accel: float = 2.0,
    max_steer_rate_deg: float = 90.0,
) -> WheelLayout:
    """
    Rectangular four-wheel chassis centered on the control center.

    Wheel order: front-left, front-right, rear-left, rear-right.
    """
    front = math.radians(front_limit_deg)
    rear = math.radians(rear_limit_deg)
    wheels = [
        (half_wheelbase, half_track),
        (half_wheelbase, -half_track),
        (-half_wheelbase, half_track),
        (-half_wheelbase, -half_track),
    ]
    return WheelLayout.uniform(
        wheels,
        steer_lower=[-front, -front, -rear, -rear],
        steer_upper=[front, front, rear, rear],
        max_speed=max_wheel_speed,
        max_accel=max_wheel_accel,
        max_steer_rate=math.radians(max_steer_rate_deg),
    )


def omni_layout(
    half_wheelbase: float = 0.5,
    half_track: float = 0.4,
    max_wheel_speed: float = 1.5,
    max_wheel_accel: float = 2.0,
    max_steer_rate_deg: float = 90.0,
) -> WheelLayout:
    return four_wheel_layout(
        half_wheelbase,
        half_track,
        front_limit_deg=90.0,
        rear_limit_deg=90.0,
        max_wheel_speed=max_wheel_speed,
        max_wheel_accel=max_wheel_accel,
        max_steer_rate_deg=max_steer_rate_deg,
    )


def bicycle_layout(
    wheelbase: float = 1.0,
    half_track: float = 0.4,
    front_limit_deg: float = 75.0,
    rear_limit_deg: float = 0.001,
    max_wheel_speed: float = 1.5,
    max_wheel_accel: float = 2.0,
    max_steer_rate_deg: float = 90.0,
) -> WheelLayout:
    """
    Car-like chassis: rear wheels at ``x = 0`` and (almost) locked, front wheels at ``x = wheelbase``.

    Sampling ICMs around the rear axle keeps the feasible set a line instead of a sliver.
    """
    front = math.radians(front_limit_deg)
    rear = math.radians(rear_limit_deg)
    wheels = [
        (wheelbase, half_track),
        (wheelbase, -half_track),
        (0.0, half_track),
        (0.0, -half_track),
    ]
    return WheelLayout.uniform(
        wheels,
        steer_lower=[-front, -front, -rear, -rear],
        steer_upper=[front, front, rear, rear],
        max_speed=max_wheel_speed,
        max_accel=max_wheel_accel,
        max_steer_rate=math.radians(max_steer_rate_deg),
    )
