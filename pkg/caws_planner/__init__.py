#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
CAWS Planner - trajectory planning for constrained all-wheel-steering robots.

A start and a goal pose on an occupancy map go through:
- Hybrid-A* search over ICM-sampled maneuvers (initial trajectory)
- RK4 direct transcription solved with IPOPT (smoothed, time-optimal trajectory)
- A rate-limited kinematic rollout with tracking and slide-ratio metrics

Core Components:
- Scenario / load_scenario_file: planning query
- plan: search
- solve: optimizer
- rollout / metrics: evaluation
"""

__version__ = "1.0.0"

# Core exports
from caws_planner.evaluate import metrics, rollout
from caws_planner.optimizer import SolverOptions, solve
from caws_planner.search import plan
from caws_planner.world import Scenario, load_scenario, load_scenario_file

__all__ = [
    "Scenario",
    "load_scenario",
    "load_scenario_file",
    "plan",
    "solve",
    "SolverOptions",
    "rollout",
    "metrics",
    "__version__",
]
