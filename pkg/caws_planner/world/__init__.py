"""Occupancy grid, footprint collision checking, chassis presets and scenario files."""

from .grid import ClearanceMap, Footprint, OccupancyGrid, collides, sample_count
from .layouts import bicycle_layout, four_wheel_layout, omni_layout
from .scenario import (
    Limits,
    Scenario,
    SearchConfig,
    Weights,
    dump_scenario,
    load_scenario,
    load_scenario_file,
)

__all__ = [
    "OccupancyGrid",
    "Footprint",
    "ClearanceMap",
    "collides",
    "sample_count",
    "four_wheel_layout",
    "omni_layout",
    "bicycle_layout",
    "Limits",
    "Weights",
    "SearchConfig",
    "Scenario",
    "load_scenario",
    "load_scenario_file",
    "dump_scenario",
]
