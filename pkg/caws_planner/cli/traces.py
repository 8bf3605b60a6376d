#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""ICM trace in spherical coordinates, one row per knot."""

import math
from dataclasses import dataclass

import numpy as np

from caws_planner.kinematics.rigid_body import J, OMEGA_SINGULAR, body_twist, wrap_angle
from caws_planner.search.sampling import spherical_from_icm
from caws_planner.search.trajectory import Trajectory

TRACE_COLUMNS = ("knot", "t", "eps", "psi", "singular")


@dataclass(frozen=True)
class IcmTrace:
    """
    Attributes:
        eps: ``arctan |r|``; ``pi/2`` on singular knots
        psi: ``atan2(-r_y, -r_x)``; 0 at the origin
        singular: ``|omega|`` below the singular threshold
    """

    times: np.ndarray
    eps: np.ndarray
    psi: np.ndarray
    singular: np.ndarray

    def __len__(self) -> int:
        return len(self.eps)

    def total_variation(self) -> float:
        """Sum of ``|d eps| + |wrap(d psi)|`` over consecutive knots."""
        if len(self) < 2:
            return 0.0
        return float(np.sum(np.abs(np.diff(self.eps))) + np.sum(np.abs(wrap_angle(np.diff(self.psi)))))


def emit_icm_trace(traj: Trajectory, omega_singular: float = OMEGA_SINGULAR) -> IcmTrace:
    """
    Spherical ICM coordinates of every knot.

    Singular knots keep the direction of the translation (``r`` along ``-J v_b``)
    so ``psi`` stays continuous into a straight segment; at rest it is 0.
    """
    eps = np.zeros(len(traj))
    psi = np.zeros(len(traj))
    singular = np.zeros(len(traj), dtype=bool)
    for h, knot in enumerate(traj.knots):
        twist = body_twist(knot.state)
        omega = twist[2]
        if abs(omega) < omega_singular:
            singular[h] = True
            eps[h] = 0.5 * math.pi
            direction = -J @ twist[:2]
            if np.hypot(*direction) > 0.0:
                psi[h] = math.atan2(-direction[1], -direction[0])
            continue
        r = -J @ twist[:2] / omega
        eps[h], psi[h] = spherical_from_icm(r)
    return IcmTrace(times=traj.times, eps=eps, psi=psi, singular=singular)


def trace_rows(trace: IcmTrace, fmt) -> list[list[str]]:
    return [
        [str(h), fmt(trace.times[h]), fmt(trace.eps[h]), fmt(trace.psi[h]), str(int(trace.singular[h]))]
        for h in range(len(trace))
    ]
