#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Exception hierarchy

Every error carries a machine-readable ``code``; the CLI prints it as
``error=<CODE> key=value ...`` and maps it to an exit status.
"""

from typing import Any, Optional


class CawsError(Exception):
    """Base class for all planner errors."""

    code = "ERROR"
    exit_status = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def one_line(self) -> str:
        """Render as a single machine-parsable line."""
        parts = [f"error={self.code}"]
        for key, value in self.details.items():
            parts.append(f"{key}={value}")
        parts.append(f"message={self.message!r}")
        return " ".join(parts)


class ParseError(CawsError):
    """The scenario or trajectory document could not be parsed."""

    code = "PARSE_ERROR"
    exit_status = 2


class ValidationError(CawsError):
    """A parsed document holds invalid values; ``field`` names the offender."""

    code = "VALIDATION_ERROR"
    exit_status = 3

    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}", field=field)
        self.field = field
        self.reason = reason


class SingularIcm(CawsError, ValueError):
    """Yaw rate too small for a finite instantaneous center of motion."""

    code = "SINGULAR_ICM"


class DegenerateBackward(CawsError, ValueError):
    """Half-angle steering formula hit a zero denominator (velocity along -x)."""

    code = "DEGENERATE_BACKWARD"


class NoPath(CawsError):
    """Search finished without reaching the goal."""

    code = "NO_PATH"
    exit_status = 4

    def __init__(self, reason: str, nodes_expanded: int):
        super().__init__(
            f"no path found: {reason}", reason=reason, nodes_expanded=nodes_expanded
        )
        self.reason = reason
        self.nodes_expanded = nodes_expanded


class SolverError(CawsError):
    """Base for optimizer outcomes that still carry a report and an iterate."""

    def __init__(self, message: str, report: Any = None, trajectory: Any = None, **details: Any):
        super().__init__(message, **details)
        self.report = report
        self.trajectory = trajectory


class Infeasible(SolverError):
    """Residuals above tolerance at termination, or the solution collides."""

    code = "INFEASIBLE"
    exit_status = 5


class MaxIterations(SolverError):
    """Iteration limit reached; ``trajectory`` holds the best iterate."""

    code = "MAX_ITERATIONS"
    exit_status = 6


class BadInitialGuess(CawsError):
    """The warm start does not satisfy the boundary conditions."""

    code = "BAD_INITIAL_GUESS"
    exit_status = 7


class ConstraintViolation(CawsError):
    """A checked trajectory violates a residual family."""

    code = "CONSTRAINT_VIOLATION"
    exit_status = 8

    def __init__(self, family: str, residual: float, tolerance: Optional[float] = None):
        super().__init__(
            f"{family} residual {residual:.3e} exceeds tolerance",
            family=family,
            residual=f"{residual:.6e}",
        )
        self.family = family
        self.residual = residual
        self.tolerance = tolerance
