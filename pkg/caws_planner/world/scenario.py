#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Planning scenario: map, chassis, limits, weights and search parameters.

Scenarios are immutable once built; ``load_scenario`` / ``dump_scenario`` convert
to and from the TOML scenario document (see docs/SCENARIO_FORMAT.md).
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from caws_planner.errors import ParseError, ValidationError
from caws_planner.kinematics.types import BodyState, WheelLayout
from caws_planner.world.grid import Footprint, OccupancyGrid, collides

logger = logging.getLogger(__name__)


def _positive(section: str, obj: object, names: tuple[str, ...]) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (math.isfinite(value) and value > 0):
            raise ValidationError(f"{section}.{name}", f"must be positive, got {value!r}")


@dataclass(frozen=True)
class Limits:
    """
    Body-level motion limits.

    Attributes:
        max_speed: Control-center speed limit v_max (m/s)
        max_yaw_rate: Yaw-rate limit (rad/s)
        max_accel_x: World-frame x acceleration bound (m/s^2)
        max_accel_y: World-frame y acceleration bound (m/s^2)
        max_yaw_accel: Yaw acceleration bound (rad/s^2)
        dt_min: Shortest optimizer time step (s)
        dt_max: Longest optimizer time step (s)
    """

    max_speed: float = 1.0
    max_yaw_rate: float = math.radians(60.0)
    max_accel_x: float = 1.0
    max_accel_y: float = 1.0
    max_yaw_accel: float = math.radians(60.0)
    dt_min: float = 0.02
    dt_max: float = 0.5

    def __post_init__(self):
        _positive(
            "limits",
            self,
            ("max_speed", "max_yaw_rate", "max_accel_x", "max_accel_y", "max_yaw_accel", "dt_min", "dt_max"),
        )
        if self.dt_min >= self.dt_max:
            raise ValidationError("limits.dt_min", f"dt_min {self.dt_min} must be below dt_max {self.dt_max}")

    @property
    def accel_bounds(self) -> tuple[float, float, float]:
        return (self.max_accel_x, self.max_accel_y, self.max_yaw_accel)


@dataclass(frozen=True)
class Weights:
    """Search and optimizer weights; defaults apply to anything the scenario omits."""

    k_h: float = 1.0
    k_vw: float = 1.0
    k_dw: float = 1.0
    accel_weights: tuple[float, float, float] = (0.1, 0.1, 0.1)
    task_weight: float = 1.0
    heading_weight: float = 1.0

    def __post_init__(self):
        for name in ("k_h", "k_vw", "k_dw", "task_weight", "heading_weight"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"weights.{name}", f"must be non-negative, got {value!r}")
        if len(self.accel_weights) != 3 or any(not (w >= 0) for w in self.accel_weights):
            raise ValidationError("weights.accel_weights", "expected three non-negative values")


@dataclass(frozen=True)
class SearchConfig:
    """
    Hybrid-A* parameters.

    ``position_resolution`` of None means twice the map resolution.
    """

    n_eps: int = 8
    n_psi: int = 8
    n_omega: int = 8
    omega_max: float = math.pi / 2
    sampling_offset: float = 1e-3
    arc_length_cap: float = 0.4
    position_resolution: Optional[float] = None
    heading_bins: int = 16
    max_step_duration: float = 1.0
    max_expansions: int = 200_000
    goal_position_tolerance: float = 0.2
    goal_heading_tolerance: float = 0.1
    shot_distance: float = 10.0

    def __post_init__(self):
        for name in ("n_eps", "n_psi", "n_omega", "heading_bins", "max_expansions"):
            if getattr(self, name) < 1:
                raise ValidationError(f"search.{name}", "must be at least 1")
        _positive(
            "search",
            self,
            (
                "omega_max",
                "sampling_offset",
                "arc_length_cap",
                "max_step_duration",
                "goal_position_tolerance",
                "goal_heading_tolerance",
            ),
        )
        if self.position_resolution is not None and not self.position_resolution > 0:
            raise ValidationError("search.position_resolution", "must be positive")
        if self.shot_distance < 0:
            raise ValidationError("search.shot_distance", "must be non-negative")

    def resolved_position_resolution(self, grid: OccupancyGrid) -> float:
        if self.position_resolution is not None:
            return self.position_resolution
        return 2.0 * grid.resolution


@dataclass(frozen=True)
class Scenario:
    """A complete planning query."""

    grid: OccupancyGrid
    layout: WheelLayout
    footprint: Footprint
    start: BodyState
    goal: BodyState
    limits: Limits = field(default_factory=Limits)
    weights: Weights = field(default_factory=Weights)
    search: SearchConfig = field(default_factory=SearchConfig)

    def __post_init__(self):
        if collides(self.grid, self.footprint, self.start.pose):
            raise ValidationError("start", f"start pose {self.start.pose} is in collision")
        if collides(self.grid, self.footprint, self.goal.pose):
            raise ValidationError("goal", f"goal pose {self.goal.pose} is in collision")

    def replace(self, **changes) -> "Scenario":
        """Copy with some fields swapped (start/goal are re-validated)."""
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return Scenario(**values)


# ============================================
# File I/O
# ============================================


def load_scenario(text: str) -> Scenario:
    """
    Parse a TOML scenario document.

    Args:
        text: Document text

    Returns:
        Validated Scenario

    Raises:
        ParseError: Malformed TOML
        ValidationError: Values out of range; ``field`` holds the dotted path
    """
    from caws_planner.world.schema import parse_document

    scenario = parse_document(text).to_scenario()
    logger.debug(
        f"Loaded scenario: map {scenario.grid.width}x{scenario.grid.height} @ {scenario.grid.resolution} m, "
        f"{scenario.layout.count} wheels"
    )
    return scenario


def load_scenario_file(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read scenario {path}: {e}", path=str(path)) from e
    logger.info(f"Loading scenario {path}")
    return load_scenario(text)


def dump_scenario(scenario: Scenario) -> str:
    """Serialize to the TOML document ``load_scenario`` reads."""
    from caws_planner.world.schema import ScenarioDocument

    return ScenarioDocument.from_scenario(scenario).to_toml()
