"""Direct-transcription smoothing of search trajectories (CasADi + IPOPT)."""

from .problem import (
    FAMILIES,
    ConstraintReport,
    OptProblem,
    TrajectoryValues,
    evaluate_constraints,
    objective,
    wheel_accelerations,
    wheel_velocities,
)
from .residuals import (
    continuity_residual,
    mode_keyframe_residual,
    rk4_step,
    steer_limit_residual,
    steer_rate_residual,
)
from .solver import OptimizedTrajectory, solve, sweep_poses, trajectory_from_values
from .transcription import SolverOptions, TrajectoryTranscription

__all__ = [
    "rk4_step",
    "continuity_residual",
    "steer_limit_residual",
    "steer_rate_residual",
    "mode_keyframe_residual",
    "OptProblem",
    "TrajectoryValues",
    "ConstraintReport",
    "FAMILIES",
    "objective",
    "evaluate_constraints",
    "wheel_velocities",
    "wheel_accelerations",
    "SolverOptions",
    "TrajectoryTranscription",
    "OptimizedTrajectory",
    "solve",
    "sweep_poses",
    "trajectory_from_values",
]
