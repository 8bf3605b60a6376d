#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Occupancy grid and rectangular footprint collision checking.

A pose collides when any occupied cell center lies inside the footprint rectangle
(grown by its inflation radius), or when a footprint corner leaves the map.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.ndimage import distance_transform_edt

from caws_planner.errors import ValidationError

logger = logging.getLogger(__name__)

FREE = "."
OCCUPIED = "#"


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """
    Boolean occupancy map.

    ``cells[j, i]`` is the cell in column ``i`` and row ``j``; row 0 is the bottom row,
    so the center of cell ``(i, j)`` is ``origin + ((i + 0.5) * res, (j + 0.5) * res)``.
    """

    width: int
    height: int
    resolution: float
    origin: tuple[float, float]
    cells: np.ndarray

    def __post_init__(self):
        if not self.resolution > 0:
            raise ValidationError("map.resolution", "must be positive")
        if self.width < 1 or self.height < 1:
            raise ValidationError("map.rows", "map needs at least one row and one column")
        cells = np.array(self.cells, dtype=bool)
        if cells.shape != (self.height, self.width):
            raise ValidationError(
                "map.rows", f"cells shape {cells.shape} != (height, width) {(self.height, self.width)}"
            )
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def empty(cls, width: int, height: int, resolution: float, origin=(0.0, 0.0)) -> "OccupancyGrid":
        return cls(width, height, resolution, tuple(origin), np.zeros((height, width), dtype=bool))

    @classmethod
    def from_rows(cls, rows: Sequence[str], resolution: float, origin=(0.0, 0.0)) -> "OccupancyGrid":
        """
        Build from ASCII rows, ``#`` occupied and ``.`` free.

        The first row is the top of the map (largest y).
        """
        rows = [row.strip() for row in rows if row.strip()]
        if not rows:
            raise ValidationError("map.rows", "no map rows given")
        width = len(rows[0])
        for k, row in enumerate(rows):
            if len(row) != width:
                raise ValidationError("map.rows", f"row {k} has {len(row)} cells, expected {width}")
            bad = set(row) - {FREE, OCCUPIED}
            if bad:
                raise ValidationError("map.rows", f"row {k} holds unknown cell symbols {sorted(bad)}")
        cells = np.array([[ch == OCCUPIED for ch in row] for row in reversed(rows)], dtype=bool)
        return cls(width, len(rows), float(resolution), (float(origin[0]), float(origin[1])), cells)

    def to_rows(self) -> list[str]:
        """ASCII rows, top row first."""
        return [
            "".join(OCCUPIED if cell else FREE for cell in row) for row in self.cells[::-1]
        ]

    def with_occupied(self, boxes: Sequence[tuple[float, float, float, float]]) -> "OccupancyGrid":
        """Copy with every cell whose center lies in one of the ``(x0, y0, x1, y1)`` boxes occupied."""
        cells = np.array(self.cells)
        cx, cy = self.cell_centers()
        for x0, y0, x1, y1 in boxes:
            cells |= (cx >= x0) & (cx <= x1) & (cy >= y0) & (cy <= y1)
        return OccupancyGrid(self.width, self.height, self.resolution, self.origin, cells)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """World coordinates of all cell centers as two ``(height, width)`` arrays."""
        i = np.arange(self.width)
        j = np.arange(self.height)
        cx = self.origin[0] + (i + 0.5) * self.resolution
        cy = self.origin[1] + (j + 0.5) * self.resolution
        return np.meshgrid(cx, cy)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """``(x_min, y_min, x_max, y_max)`` of the mapped area."""
        ox, oy = self.origin
        return (ox, oy, ox + self.width * self.resolution, oy + self.height * self.resolution)

    def __eq__(self, other):
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.resolution == other.resolution
            and tuple(self.origin) == tuple(other.origin)
            and np.array_equal(self.cells, other.cells)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Footprint:
    """Body-frame rectangle centered on the control center, optionally grown by ``inflation``."""

    half_length: float
    half_width: float
    inflation: float = 0.0

    def __post_init__(self):
        if not self.half_length > 0:
            raise ValidationError("robot.half_length", "must be positive")
        if not self.half_width > 0:
            raise ValidationError("robot.half_width", "must be positive")
        if self.inflation < 0:
            raise ValidationError("robot.inflation", "must be non-negative")

    @property
    def circumradius(self) -> float:
        """Radius of the disc around the control center containing the inflated footprint."""
        return math.hypot(self.half_length, self.half_width) + self.inflation

    def corners(self, pose: Sequence[float]) -> np.ndarray:
        """World coordinates of the four (un-inflated) corners, shape ``(4, 2)``."""
        x, y, theta = pose
        c, s = math.cos(theta), math.sin(theta)
        local = np.array(
            [
                [self.half_length, self.half_width],
                [-self.half_length, self.half_width],
                [-self.half_length, -self.half_width],
                [self.half_length, -self.half_width],
            ]
        )
        return np.column_stack(
            [x + c * local[:, 0] - s * local[:, 1], y + s * local[:, 0] + c * local[:, 1]]
        )


def collides(grid: OccupancyGrid, footprint: Footprint, pose: Sequence[float]) -> bool:
    """
    Exact footprint-vs-grid test for one pose.

    Args:
        grid: Occupancy grid
        footprint: Robot footprint
        pose: ``(x, y, theta)``

    Returns:
        True if an occupied cell center lies inside the inflated footprint or a
        corner falls outside the map
    """
    x, y, theta = (float(v) for v in pose)
    x_min, y_min, x_max, y_max = grid.bounds
    corners = footprint.corners((x, y, theta))
    if (
        corners[:, 0].min() < x_min
        or corners[:, 0].max() > x_max
        or corners[:, 1].min() < y_min
        or corners[:, 1].max() > y_max
    ):
        return True

    c, s = math.cos(theta), math.sin(theta)
    reach_l = footprint.half_length + footprint.inflation
    reach_w = footprint.half_width + footprint.inflation
    ex = abs(c) * reach_l + abs(s) * reach_w
    ey = abs(s) * reach_l + abs(c) * reach_w

    res = grid.resolution
    ox, oy = grid.origin
    # one extra cell on each side so rounding never drops a candidate
    i0 = max(int(math.floor((x - ex - ox) / res - 0.5)), 0)
    i1 = min(int(math.ceil((x + ex - ox) / res - 0.5)), grid.width - 1)
    j0 = max(int(math.floor((y - ey - oy) / res - 0.5)), 0)
    j1 = min(int(math.ceil((y + ey - oy) / res - 0.5)), grid.height - 1)
    if i0 > i1 or j0 > j1:
        return False

    window = grid.cells[j0 : j1 + 1, i0 : i1 + 1]
    if not window.any():
        return False

    jj, ii = np.nonzero(window)
    dx = ox + (ii + i0 + 0.5) * res - x
    dy = oy + (jj + j0 + 0.5) * res - y
    bx = c * dx + s * dy
    by = -s * dx + c * dy
    out_l = np.maximum(np.abs(bx) - footprint.half_length, 0.0)
    out_w = np.maximum(np.abs(by) - footprint.half_width, 0.0)
    return bool(np.any(out_l**2 + out_w**2 <= footprint.inflation**2))


def sample_count(footprint: Footprint, distance: float, dtheta: float, resolution: float) -> int:
    """
    Sub-samples needed so no footprint point moves more than half a cell between samples.

    Any body point moves at most ``distance + |dtheta| * circumradius`` during the motion.
    """
    travel = abs(distance) + abs(dtheta) * footprint.circumradius
    return max(1, int(math.ceil(travel / (0.5 * resolution))))


class ClearanceMap:
    """
    Distance from each cell center to the nearest occupied cell center.

    Used as a conservative fast path: a pose whose footprint disc clears every
    obstacle never needs the exact test.
    """

    def __init__(self, grid: OccupancyGrid, footprint: Footprint):
        self.grid = grid
        self.footprint = footprint
        if grid.cells.any():
            self.distance = distance_transform_edt(~grid.cells, sampling=grid.resolution)
        else:
            self.distance = np.full(grid.cells.shape, np.inf)
        self._margin = footprint.circumradius
        self._slack = footprint.circumradius + grid.resolution * math.sqrt(0.5)

    def poses_collide(self, poses: np.ndarray) -> np.ndarray:
        """
        Collision flags for an ``(n, 3)`` array of poses.

        Returns:
            Boolean array of shape ``(n,)``
        """
        poses = np.atleast_2d(np.asarray(poses, dtype=float))
        if len(poses) == 0:
            return np.zeros(0, dtype=bool)
        grid = self.grid
        x_min, y_min, x_max, y_max = grid.bounds
        x, y = poses[:, 0], poses[:, 1]
        inside = (
            (x - self._margin >= x_min)
            & (x + self._margin <= x_max)
            & (y - self._margin >= y_min)
            & (y + self._margin <= y_max)
        )
        i = np.clip(((x - grid.origin[0]) / grid.resolution).astype(int), 0, grid.width - 1)
        j = np.clip(((y - grid.origin[1]) / grid.resolution).astype(int), 0, grid.height - 1)
        clear = inside & (self.distance[j, i] > self._slack)

        result = np.zeros(len(poses), dtype=bool)
        for k in np.flatnonzero(~clear):
            result[k] = collides(grid, self.footprint, poses[k])
        return result

    def any_collision(self, poses: np.ndarray) -> bool:
        """True if any pose in the ``(n, 3)`` array collides."""
        return bool(self.poses_collide(poses).any())
