#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Scenario document schema (pydantic).

The document is TOML with sections [map], [robot], [limits], [weights], [search],
[start] and [goal]. Angles are degrees at this boundary and radians everywhere else.
"""

import math
import sys
from typing import Optional, Union

import tomli_w
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from caws_planner.errors import ParseError, ValidationError
from caws_planner.kinematics.types import BodyState, WheelLayout
from caws_planner.world.grid import Footprint, OccupancyGrid

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PerWheel = Union[float, list[float]]


def _per_wheel(value: PerWheel, n: int) -> list[float]:
    if isinstance(value, list):
        return [float(v) for v in value]
    return [float(value)] * n


def _compact(values: list[float]) -> PerWheel:
    return values[0] if len(set(values)) == 1 else values


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MapSection(_Section):
    resolution: float = Field(..., gt=0, description="Cell size (m)")
    origin: tuple[float, float] = Field((0.0, 0.0), description="World coordinates of the bottom-left corner")
    rows: Optional[Union[str, list[str]]] = Field(
        None, description="ASCII rows, top row first; '#' occupied, '.' free"
    )
    width: Optional[int] = Field(None, ge=1, description="Cell columns of an empty map")
    height: Optional[int] = Field(None, ge=1, description="Cell rows of an empty map")

    @model_validator(mode="after")
    def _rows_or_size(self):
        if self.rows is None and (self.width is None or self.height is None):
            raise ValueError("give either rows or both width and height")
        return self

    def to_grid(self) -> OccupancyGrid:
        if self.rows is None:
            return OccupancyGrid.empty(self.width, self.height, self.resolution, self.origin)
        rows = self.rows.splitlines() if isinstance(self.rows, str) else self.rows
        return OccupancyGrid.from_rows(rows, self.resolution, self.origin)


class RobotSection(_Section):
    wheels: list[tuple[float, float]] = Field(..., min_length=1, description="Wheel positions (m)")
    steer_lower_deg: PerWheel = Field(-90.0, description="Lower steering bound (deg)")
    steer_upper_deg: PerWheel = Field(90.0, description="Upper steering bound (deg)")
    max_wheel_speed: PerWheel = Field(1.5, description="Wheel speed limit (m/s)")
    max_wheel_accel: PerWheel = Field(2.0, description="Wheel acceleration limit (m/s^2)")
    max_steer_rate_deg: PerWheel = Field(90.0, description="Steering rate limit (deg/s)")
    half_length: float = Field(..., gt=0, description="Footprint half length (m)")
    half_width: float = Field(..., gt=0, description="Footprint half width (m)")
    inflation: float = Field(0.0, ge=0, description="Footprint corner inflation (m)")

    def to_layout(self) -> WheelLayout:
        n = len(self.wheels)
        return WheelLayout(
            wheels=tuple((float(x), float(y)) for x, y in self.wheels),
            steer_lower=tuple(math.radians(v) for v in _per_wheel(self.steer_lower_deg, n)),
            steer_upper=tuple(math.radians(v) for v in _per_wheel(self.steer_upper_deg, n)),
            max_speed=tuple(_per_wheel(self.max_wheel_speed, n)),
            max_accel=tuple(_per_wheel(self.max_wheel_accel, n)),
            max_steer_rate=tuple(math.radians(v) for v in _per_wheel(self.max_steer_rate_deg, n)),
        )


class LimitsSection(_Section):
    max_speed: float = Field(1.0, gt=0)
    max_yaw_rate_deg: float = Field(60.0, gt=0)
    max_accel_x: float = Field(1.0, gt=0)
    max_accel_y: float = Field(1.0, gt=0)
    max_yaw_accel_deg: float = Field(60.0, gt=0)
    dt_min: float = Field(0.02, gt=0)
    dt_max: float = Field(0.5, gt=0)


class WeightsSection(_Section):
    k_h: float = Field(1.0, ge=0, description="Heuristic time ratio")
    k_vw: float = Field(1.0, ge=0, description="Wheel speed change weight")
    k_dw: float = Field(1.0, ge=0, description="Wheel steering change weight")
    a_diag: tuple[float, float, float] = Field((0.1, 0.1, 0.1), description="Control effort diagonal")
    task_weight: float = Field(1.0, ge=0, description="Reference tracking weight")
    heading_weight: float = Field(1.0, ge=0, description="Heading share of the tracking term (m^2/rad^2)")


class SearchSection(_Section):
    n_eps: int = Field(8, ge=1)
    n_psi: int = Field(8, ge=1)
    n_omega: int = Field(8, ge=1)
    omega_max_deg: float = Field(90.0, gt=0)
    sampling_offset: float = Field(1e-3, gt=0)
    arc_length_cap: float = Field(0.4, gt=0)
    position_resolution: Optional[float] = Field(None, gt=0)
    heading_bins: int = Field(16, ge=1)
    max_step_duration: float = Field(1.0, gt=0)
    max_expansions: int = Field(200000, ge=1)
    goal_position_tolerance: float = Field(0.2, gt=0)
    goal_heading_tolerance: float = Field(0.1, gt=0)
    shot_distance: float = Field(10.0, ge=0)


class StateSection(_Section):
    x: float
    y: float
    theta_deg: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    omega_deg: float = 0.0

    def to_state(self) -> BodyState:
        return BodyState(
            self.x, self.y, math.radians(self.theta_deg), self.vx, self.vy, math.radians(self.omega_deg)
        )

    @classmethod
    def from_state(cls, state: BodyState) -> "StateSection":
        return cls(
            x=state.x,
            y=state.y,
            theta_deg=math.degrees(state.theta),
            vx=state.vx,
            vy=state.vy,
            omega_deg=math.degrees(state.omega),
        )


class ScenarioDocument(_Section):
    """Whole scenario file."""

    map: MapSection
    robot: RobotSection
    limits: LimitsSection = Field(default_factory=LimitsSection)
    weights: WeightsSection = Field(default_factory=WeightsSection)
    search: SearchSection = Field(default_factory=SearchSection)
    start: StateSection
    goal: StateSection

    def to_scenario(self):
        from caws_planner.world.scenario import Limits, Scenario, SearchConfig, Weights

        lim = self.limits
        w = self.weights
        s = self.search
        return Scenario(
            grid=self.map.to_grid(),
            layout=self.robot.to_layout(),
            footprint=Footprint(self.robot.half_length, self.robot.half_width, self.robot.inflation),
            start=self.start.to_state(),
            goal=self.goal.to_state(),
            limits=Limits(
                max_speed=lim.max_speed,
                max_yaw_rate=math.radians(lim.max_yaw_rate_deg),
                max_accel_x=lim.max_accel_x,
                max_accel_y=lim.max_accel_y,
                max_yaw_accel=math.radians(lim.max_yaw_accel_deg),
                dt_min=lim.dt_min,
                dt_max=lim.dt_max,
            ),
            weights=Weights(
                k_h=w.k_h,
                k_vw=w.k_vw,
                k_dw=w.k_dw,
                accel_weights=tuple(w.a_diag),
                task_weight=w.task_weight,
                heading_weight=w.heading_weight,
            ),
            search=SearchConfig(
                n_eps=s.n_eps,
                n_psi=s.n_psi,
                n_omega=s.n_omega,
                omega_max=math.radians(s.omega_max_deg),
                sampling_offset=s.sampling_offset,
                arc_length_cap=s.arc_length_cap,
                position_resolution=s.position_resolution,
                heading_bins=s.heading_bins,
                max_step_duration=s.max_step_duration,
                max_expansions=s.max_expansions,
                goal_position_tolerance=s.goal_position_tolerance,
                goal_heading_tolerance=s.goal_heading_tolerance,
                shot_distance=s.shot_distance,
            ),
        )

    @classmethod
    def from_scenario(cls, scenario) -> "ScenarioDocument":
        grid = scenario.grid
        layout = scenario.layout
        lim = scenario.limits
        w = scenario.weights
        s = scenario.search
        return cls(
            map=MapSection(resolution=grid.resolution, origin=grid.origin, rows=grid.to_rows()),
            robot=RobotSection(
                wheels=[tuple(wh) for wh in layout.wheels],
                steer_lower_deg=_compact([math.degrees(v) for v in layout.steer_lower]),
                steer_upper_deg=_compact([math.degrees(v) for v in layout.steer_upper]),
                max_wheel_speed=_compact(list(layout.max_speed)),
                max_wheel_accel=_compact(list(layout.max_accel)),
                max_steer_rate_deg=_compact([math.degrees(v) for v in layout.max_steer_rate]),
                half_length=scenario.footprint.half_length,
                half_width=scenario.footprint.half_width,
                inflation=scenario.footprint.inflation,
            ),
            limits=LimitsSection(
                max_speed=lim.max_speed,
                max_yaw_rate_deg=math.degrees(lim.max_yaw_rate),
                max_accel_x=lim.max_accel_x,
                max_accel_y=lim.max_accel_y,
                max_yaw_accel_deg=math.degrees(lim.max_yaw_accel),
                dt_min=lim.dt_min,
                dt_max=lim.dt_max,
            ),
            weights=WeightsSection(
                k_h=w.k_h,
                k_vw=w.k_vw,
                k_dw=w.k_dw,
                a_diag=tuple(w.accel_weights),
                task_weight=w.task_weight,
                heading_weight=w.heading_weight,
            ),
            search=SearchSection(
                n_eps=s.n_eps,
                n_psi=s.n_psi,
                n_omega=s.n_omega,
                omega_max_deg=math.degrees(s.omega_max),
                sampling_offset=s.sampling_offset,
                arc_length_cap=s.arc_length_cap,
                position_resolution=s.position_resolution,
                heading_bins=s.heading_bins,
                max_step_duration=s.max_step_duration,
                max_expansions=s.max_expansions,
                goal_position_tolerance=s.goal_position_tolerance,
                goal_heading_tolerance=s.goal_heading_tolerance,
                shot_distance=s.shot_distance,
            ),
            start=StateSection.from_state(scenario.start),
            goal=StateSection.from_state(scenario.goal),
        )

    def to_toml(self) -> str:
        data = self.model_dump(mode="json", exclude_none=True)
        return tomli_w.dumps(data)


def parse_document(text: str) -> ScenarioDocument:
    """
    TOML text to a validated ScenarioDocument.

    Raises:
        ParseError: Malformed TOML
        ValidationError: Schema violations, with the dotted field path
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ParseError(f"malformed scenario document: {e}") from e
    try:
        return ScenarioDocument.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        field_path = ".".join(str(part) for part in first["loc"]) or "document"
        raise ValidationError(field_path, first["msg"]) from e
