"""Kinematic rollout of trajectories and the evaluation metrics computed from it."""

from .follower import (
    DOUBLE_INTEGRATOR,
    RIGID,
    FollowerConfig,
    FollowRecord,
    ReferenceSampler,
    fit_body_twist,
    rate_limit,
    rollout,
    steer_within_limits,
    upcoming_steer,
)
from .metrics import Metrics, SlideRatio, dense_reference, metrics, slide_ratio, slide_ratio_terms

__all__ = [
    "DOUBLE_INTEGRATOR",
    "RIGID",
    "FollowerConfig",
    "FollowRecord",
    "ReferenceSampler",
    "fit_body_twist",
    "rate_limit",
    "rollout",
    "steer_within_limits",
    "upcoming_steer",
    "Metrics",
    "SlideRatio",
    "dense_reference",
    "metrics",
    "slide_ratio",
    "slide_ratio_terms",
]
