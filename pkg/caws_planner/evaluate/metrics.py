#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Rollout metrics: tracking errors, slide ratio and motion statistics.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from caws_planner.evaluate.follower import DOUBLE_INTEGRATOR, RIGID, FollowRecord, ReferenceSampler
from caws_planner.kinematics.rigid_body import rotation, wheel_states, wrap_angle
from caws_planner.search.trajectory import InitialTrajectory, Trajectory

logger = logging.getLogger(__name__)

# Reference samples per follower tick for nearest-pose queries
_DENSITY = 4


@dataclass(frozen=True)
class SlideRatio:
    """
    Per-tick slide ratio series.

    Attributes:
        literal: ``max_w v_w cos(delta_real - delta_ref)``
        lateral: ``max_w |v_w sin(delta_real - delta_ref)|``
    """

    literal: np.ndarray
    lateral: np.ndarray


@dataclass(frozen=True)
class Metrics:
    """
    Summary of one rollout.

    Velocity, acceleration and jerk triples are ``(x, y, yaw)`` in the body frame.
    """

    ticks: int
    mean_position_error: float
    mean_heading_error: float
    max_position_error: float
    slide_literal_mean: float
    slide_literal_std: float
    slide_lateral_mean: float
    slide_lateral_std: float
    slide_lateral_max: float
    mean_velocity: tuple[float, float, float]
    mean_acceleration: tuple[float, float, float]
    mean_jerk: tuple[float, float, float]
    mean_jerk_norm: float

    def to_dict(self) -> dict[str, float]:
        """Flat mapping with ``_x``/``_y``/``_yaw`` suffixes for the triples."""
        out: dict[str, float] = {}
        for name, value in self.__dict__.items():
            if isinstance(value, tuple):
                for axis, item in zip(("x", "y", "yaw"), value):
                    out[f"{name}_{axis}"] = item
            else:
                out[name] = value
        return out


def slide_ratio_terms(speed, steer_real, steer_ref) -> tuple[float, float]:
    """
    Both slide ratio variants for one tick.

    Args:
        speed: Wheel speeds (sign ignored)
        steer_real: Achieved steering angles (rad)
        steer_ref: Kinematically ideal steering angles (rad)

    Returns:
        ``(literal, lateral)``; ``(0, 0)`` when every wheel is stopped
    """
    v = np.abs(np.asarray(speed, dtype=float))
    diff = np.asarray(steer_real, dtype=float) - np.asarray(steer_ref, dtype=float)
    if not np.any(v > 0):
        return 0.0, 0.0
    return float(np.max(v * np.cos(diff))), float(np.max(np.abs(v * np.sin(diff))))


def slide_ratio(record: FollowRecord) -> SlideRatio:
    """
    Slide ratio per tick.

    The ideal steering is the one the reference body motion demands at that
    tick; a wheel whose ideal velocity vanishes is taken as aligned.
    """
    positions = record.layout.positions
    literal = np.zeros(len(record))
    lateral = np.zeros(len(record))
    for k in range(len(record)):
        ref = record.reference[k]
        v_body = rotation(ref[2]).T @ ref[3:5]
        twist = np.array([v_body[0], v_body[1], ref[5]])
        real = record.achieved_steer[k]
        ideal, _ = wheel_states(twist, positions, record.flags[k], real)
        literal[k], lateral[k] = slide_ratio_terms(record.achieved_speed[k], real, ideal)
    return SlideRatio(literal=literal, lateral=lateral)


def dense_reference(reference: Trajectory, period: float) -> np.ndarray:
    """Reference states sampled ``_DENSITY`` times per follower tick, shape ``(m, 6)``."""
    mode = RIGID if isinstance(reference, InitialTrajectory) else DOUBLE_INTEGRATOR
    sampler = ReferenceSampler(reference, mode)
    step = period / _DENSITY
    count = int(math.floor(sampler.total_time / step + 1e-9)) + 1
    samples = [sampler.sample(k * step)[0] for k in range(count)]
    if count * step < sampler.total_time + 1e-12:
        samples.append(sampler.sample(sampler.total_time)[0])
    return np.vstack(samples)


def _body_frame(theta: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([c * vectors[:, 0] + s * vectors[:, 1], -s * vectors[:, 0] + c * vectors[:, 1]], axis=1)


def _mean_abs(values: np.ndarray) -> tuple[float, float, float]:
    if len(values) == 0:
        return 0.0, 0.0, 0.0
    means = np.mean(np.abs(values), axis=0)
    return float(means[0]), float(means[1]), float(means[2])


def metrics(record: FollowRecord, reference: Trajectory) -> Metrics:
    """
    Tracking, slip and smoothness statistics of a rollout.

    Args:
        record: Follower output (non-empty)
        reference: Trajectory the errors are measured against

    Returns:
        Metrics
    """
    if len(record) == 0:
        raise ValueError("metrics need a non-empty record")
    period = record.period
    achieved = record.achieved

    dense = dense_reference(reference, period)
    tree = cKDTree(dense[:, :2])
    distance, index = tree.query(achieved[:, :2])
    heading = np.abs(wrap_angle(achieved[:, 2] - dense[index, 2]))

    slide = slide_ratio(record)

    theta = achieved[:, 2]
    velocity = np.column_stack([_body_frame(theta, achieved[:, 3:5]), achieved[:, 5]])
    accel_world = np.diff(achieved[:, 3:6], axis=0) / period
    accel = np.column_stack([_body_frame(theta[:-1], accel_world[:, :2]), accel_world[:, 2]])
    jerk_world = np.diff(accel_world, axis=0) / period
    jerk = np.column_stack([_body_frame(theta[:-2], jerk_world[:, :2]), jerk_world[:, 2]])
    jerk_norm = float(np.mean(np.hypot(jerk[:, 0], jerk[:, 1]))) if len(jerk) else 0.0

    result = Metrics(
        ticks=len(record),
        mean_position_error=float(np.mean(distance)),
        mean_heading_error=float(np.mean(heading)),
        max_position_error=float(np.max(distance)),
        slide_literal_mean=float(np.mean(slide.literal)),
        slide_literal_std=float(np.std(slide.literal)),
        slide_lateral_mean=float(np.mean(slide.lateral)),
        slide_lateral_std=float(np.std(slide.lateral)),
        slide_lateral_max=float(np.max(slide.lateral)),
        mean_velocity=_mean_abs(velocity),
        mean_acceleration=_mean_abs(accel),
        mean_jerk=_mean_abs(jerk),
        mean_jerk_norm=jerk_norm,
    )
    logger.info(
        f"Metrics: d={result.mean_position_error:.4f}m, theta={result.mean_heading_error:.4f}rad, "
        f"slide_lateral={result.slide_lateral_mean:.4f}+-{result.slide_lateral_std:.4f}"
    )
    return result
