#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Trajectory and report files.

Trajectory CSV columns: ``t, dt, x, y, theta, vx, vy, omega, ax, ay, alpha, phase``
followed by ``steer_i, speed_i, dir_i`` for every wheel ``i``. Floats use 12
significant digits so repeated runs produce identical bytes.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Iterable, Mapping, Union

import numpy as np

from caws_planner.errors import ParseError
from caws_planner.kinematics.types import WheelLayout
from caws_planner.search.trajectory import Trajectory, build_knots

logger = logging.getLogger(__name__)

CSV = "csv"
TABULAR = "tabular"
FORMATS = (CSV, TABULAR)

BODY_COLUMNS = ("t", "dt", "x", "y", "theta", "vx", "vy", "omega", "ax", "ay", "alpha", "phase")


def fmt(value: float) -> str:
    """12 significant digits; negative zero prints as ``0``."""
    text = f"{float(value):.12g}"
    return "0" if text == "-0" else text


def trajectory_columns(wheels: int) -> list[str]:
    columns = list(BODY_COLUMNS)
    for i in range(wheels):
        columns += [f"steer_{i}", f"speed_{i}", f"dir_{i}"]
    return columns


def trajectory_rows(traj: Trajectory) -> list[list[str]]:
    """Formatted rows (without the header)."""
    times = traj.times
    rows = []
    for h, knot in enumerate(traj.knots):
        row = [fmt(times[h]), fmt(knot.dt)]
        row += [fmt(v) for v in knot.state.as_array()]
        row += [fmt(v) for v in knot.control.as_array()]
        row.append(str(knot.phase))
        for steer, speed, flag in zip(knot.steer, knot.speed, knot.flags):
            row += [fmt(steer), fmt(speed), str(flag)]
        rows.append(row)
    return rows


def _render(header: list[str], rows: Iterable[list[str]], output_format: str) -> str:
    rows = list(rows)
    if output_format == CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()
    if output_format == TABULAR:
        widths = [max(len(c), *(len(r[i]) for r in rows)) if rows else len(c) for i, c in enumerate(header)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(header, widths))]
        lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown output format {output_format!r}")


def write_trajectory(traj: Trajectory, path: Union[str, Path], output_format: str = CSV) -> Path:
    path = Path(path)
    text = _render(trajectory_columns(traj.layout.count), trajectory_rows(traj), output_format)
    path.write_text(text, encoding="utf-8")
    logger.debug(f"Wrote {len(traj)} knots to {path}")
    return path


def _split(text: str) -> list[list[str]]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        return []
    if "," in lines[0]:
        return [row for row in csv.reader(lines)]
    return [line.split() for line in lines]


def read_trajectory(path: Union[str, Path], layout: WheelLayout) -> Trajectory:
    """
    Load a trajectory written by ``write_trajectory`` (either format).

    Args:
        path: File to read
        layout: Wheel layout of the scenario the trajectory belongs to

    Raises:
        ParseError: Unreadable file, wrong header, or non-numeric cells
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}", path=str(path)) from e

    table = _split(text)
    expected = trajectory_columns(layout.count)
    if not table or table[0] != expected:
        raise ParseError(
            f"{path}: header does not match a {layout.count}-wheel trajectory", path=str(path)
        )
    body = table[1:]
    if not body:
        raise ParseError(f"{path}: no knots", path=str(path))
    try:
        values = np.array([[float(v) for v in row] for row in body], dtype=float)
    except ValueError as e:
        raise ParseError(f"{path}: {e}", path=str(path)) from e
    if values.shape[1] != len(expected) or not np.all(np.isfinite(values)):
        raise ParseError(f"{path}: malformed or non-finite rows", path=str(path))

    n = layout.count
    wheel = values[:, len(BODY_COLUMNS):].reshape(len(values), n, 3)
    knots = build_knots(
        states=values[:, 2:8],
        controls=values[:, 8:11],
        dts=values[:, 1],
        phases=values[:, 11].astype(int),
        flags=wheel[:, :, 2].astype(int),
        layout=layout,
        steer=wheel[:, :, 0],
        speed=wheel[:, :, 1],
    )
    logger.debug(f"Read {len(knots)} knots from {path}")
    return Trajectory(knots=knots, layout=layout)


def write_table(
    header: list[str], rows: Iterable[list[str]], path: Union[str, Path], output_format: str = CSV
) -> Path:
    path = Path(path)
    path.write_text(_render(header, rows, output_format), encoding="utf-8")
    return path


def key_value_text(items: Mapping[str, object]) -> str:
    """``key=value`` lines in insertion order; floats with 12 significant digits."""
    lines = []
    for key, value in items.items():
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, (float, np.floating)):
            text = fmt(value)
        else:
            text = str(value)
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def read_key_value(path: Union[str, Path]) -> dict[str, str]:
    result = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            result[key.strip()] = value.strip()
    return result
