#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
ICM sampling in spherical coordinates and per-wheel steering feasibility.

An ICM radius is parameterized by ``(eps, psi)`` with ``|r| = tan(eps)``, so spot
rotations sit at ``eps = 0`` and straight translations at the ``eps -> pi/2`` ring.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from caws_planner.kinematics.rigid_body import wheel_velocities_body, wrap_angle
from caws_planner.kinematics.types import WheelLayout

# Wheels slower than this (relative to the twist scale) sit on the ICM
_AT_ICM = 1e-12
_BOUND_TOL = 1e-12


@dataclass(frozen=True)
class IcmSampleSet:
    """Grid of ICM samples: ``eps_values`` x ``psi_values`` x ``omega_values``."""

    eps_values: np.ndarray
    psi_values: np.ndarray
    omega_values: np.ndarray
    arc_length_cap: float

    def radii(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        ICM radius for every ``(eps, psi)`` pair.

        The ``psi = -pi`` column duplicates ``psi = pi`` and is dropped.

        Returns:
            ``(eps, psi, r)`` with ``r`` of shape ``(m, 2)``
        """
        psi = self.psi_values
        if len(psi) > 1 and math.isclose(psi[0], -math.pi) and math.isclose(psi[-1], math.pi):
            psi = psi[1:]
        eps_grid, psi_grid = np.meshgrid(self.eps_values, psi, indexing="ij")
        eps_flat = eps_grid.ravel()
        psi_flat = psi_grid.ravel()
        return eps_flat, psi_flat, icm_from_spherical(eps_flat, psi_flat)


def icm_from_spherical(eps, psi) -> np.ndarray:
    """``r = (-tan(eps) cos(psi), -tan(eps) sin(psi))``; works on scalars or arrays."""
    eps = np.asarray(eps, dtype=float)
    psi = np.asarray(psi, dtype=float)
    radius = np.tan(eps)
    return np.stack([-radius * np.cos(psi), -radius * np.sin(psi)], axis=-1)


def spherical_from_icm(r: Sequence[float]) -> tuple[float, float]:
    """Inverse of ``icm_from_spherical``; ``psi`` is 0 at the origin."""
    rx, ry = float(r[0]), float(r[1])
    norm = math.hypot(rx, ry)
    if norm == 0.0:
        return 0.0, 0.0
    return math.atan(norm), math.atan2(-ry, -rx)


def sample_icm_grid(
    n_eps: int = 8,
    n_psi: int = 8,
    n_omega: int = 8,
    omega_max: float = math.pi / 2,
    sampling_offset: float = 1e-3,
    arc_length_cap: float = 0.4,
) -> IcmSampleSet:
    """
    Uniform grid over the spherical ICM coordinates and the yaw rate.

    Args:
        n_eps: N for the eps axis; ``eps_i = (pi*i + offset) / (2N + offset)``, i = 0..N
        n_psi: N for the psi axis; ``psi_i = -pi + 2*pi*i/N``, i = 0..N
        n_omega: Yaw-rate samples, uniform over ``[-omega_max, omega_max]``
        omega_max: Yaw-rate sampling range (rad/s)
        sampling_offset: Offset keeping every eps strictly inside (0, pi/2)
        arc_length_cap: Longest arc a single maneuver may travel (m)

    Returns:
        IcmSampleSet
    """
    i = np.arange(n_eps + 1, dtype=float)
    eps = (math.pi * i + sampling_offset) / (2.0 * n_eps + sampling_offset)
    psi = -math.pi + 2.0 * math.pi * np.arange(n_psi + 1, dtype=float) / n_psi
    omega = np.linspace(-omega_max, omega_max, n_omega) if n_omega > 1 else np.array([omega_max])
    return IcmSampleSet(eps, psi, omega, arc_length_cap)


def resolve_wheels(
    twist: Sequence[float], layout: WheelLayout
) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """
    Steering angles and rolling directions realizing a body twist within the steering limits.

    For each wheel both the forward angle and the reversed one (``+pi``) are tried;
    the feasible angle with the smaller ``|steer|`` wins, forward on ties. A wheel
    sitting on the ICM has no defined direction and takes the in-range angle
    closest to 0 with a forward flag.

    Args:
        twist: Body-frame ``(vx, vy, omega)``
        layout: Wheel layout

    Returns:
        ``(steer, flags)`` arrays, or None when some wheel has no feasible angle
    """
    v = wheel_velocities_body(twist, layout.positions)
    scale = max(1.0, float(np.max(np.abs(twist))))
    lower, upper = layout.lower, layout.upper
    steer = np.zeros(layout.count)
    flags = np.ones(layout.count, dtype=int)
    for w in range(layout.count):
        if math.hypot(v[w, 0], v[w, 1]) <= _AT_ICM * scale:
            steer[w] = min(max(0.0, lower[w]), upper[w])
            continue
        forward = math.atan2(v[w, 1], v[w, 0])
        backward = wrap_angle(forward + math.pi)
        options = [
            (abs(angle), k, angle, flag)
            for k, (angle, flag) in enumerate(((forward, 1), (backward, -1)))
            if lower[w] - _BOUND_TOL <= angle <= upper[w] + _BOUND_TOL
        ]
        if not options:
            return None
        _, _, steer[w], flags[w] = min(options)
    return steer, flags


def feasible(r: Sequence[float], layout: WheelLayout, omega_sign: int = 1) -> Optional[np.ndarray]:
    """
    Direction flags for rotating about the ICM at radius ``r``, or None if infeasible.

    Every wheel must roll perpendicular to ``r + w``; the steering limits decide
    whether it does so forward or backward.
    """
    r = np.asarray(r, dtype=float)
    sign = 1.0 if omega_sign >= 0 else -1.0
    twist = (-sign * r[1], sign * r[0], sign)
    resolved = resolve_wheels(twist, layout)
    if resolved is None:
        return None
    return resolved[1]


def steer_error(a, b):
    """Wrapped angular distance between steering angles."""
    return np.abs(wrap_angle(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
