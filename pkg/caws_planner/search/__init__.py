"""Hybrid-A* search over sampled ICM maneuvers, producing the initial trajectory."""

from .callback import NoOpCallback, SearchCallback
from .costs import heuristic, step_cost, time_costs
from .maneuvers import (
    GoalShot,
    Maneuver,
    ManeuverLibrary,
    compose,
    forward_simulate,
    goal_shot,
    rigid_step,
    rigid_twist_between,
    world_velocity,
)
from .planner import HybridAStarPlanner, SearchNode, plan
from .sampling import (
    IcmSampleSet,
    feasible,
    icm_from_spherical,
    resolve_wheels,
    sample_icm_grid,
    spherical_from_icm,
)
from .trajectory import (
    InitialTrajectory,
    Trajectory,
    TrajectoryKnot,
    build_knots,
    keyframe_mask,
    reversed_trajectory,
    wheel_fields,
)

__all__ = [
    "IcmSampleSet",
    "sample_icm_grid",
    "icm_from_spherical",
    "spherical_from_icm",
    "resolve_wheels",
    "feasible",
    "Maneuver",
    "ManeuverLibrary",
    "GoalShot",
    "forward_simulate",
    "goal_shot",
    "rigid_step",
    "rigid_twist_between",
    "world_velocity",
    "compose",
    "step_cost",
    "time_costs",
    "heuristic",
    "SearchNode",
    "HybridAStarPlanner",
    "plan",
    "SearchCallback",
    "NoOpCallback",
    "TrajectoryKnot",
    "Trajectory",
    "InitialTrajectory",
    "build_knots",
    "keyframe_mask",
    "wheel_fields",
    "reversed_trajectory",
]
