#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Direct transcription of the smoothing program with the CasADi Opti stack.

Decision variables: states ``X`` (6 x H), controls ``U`` (3 x H-1) and step
durations ``DT`` (H-1). CasADi's automatic differentiation supplies exact
gradients and Jacobians; IPOPT solves the resulting NLP.
"""

import logging
import math
from dataclasses import dataclass

import casadi as cs
import numpy as np

from caws_planner.optimizer.problem import OptProblem, TrajectoryValues

logger = logging.getLogger(__name__)

# Keeps the steering-rate constraint differentiable when a wheel stops
RATE_SQRT_EPS = 1e-16


@dataclass(frozen=True)
class SolverOptions:
    """
    IPOPT settings.

    Attributes:
        max_iter: Iteration limit
        opt_tol: First-order optimality tolerance
        feas_tol: Largest accepted constraint residual (every family)
        print_level: IPOPT verbosity (0 silent)
        check_collisions: Run the collision post-check after solving
    """

    max_iter: int = 3000
    opt_tol: float = 1e-6
    feas_tol: float = 1e-6
    print_level: int = 0
    check_collisions: bool = True


@dataclass(frozen=True)
class TranscriptionResult:
    values: TrajectoryValues
    status: str
    iterations: int
    success: bool


def _dynamics(x, u):
    return cs.vertcat(x[3], x[4], x[5], u[0], u[1], u[2])


def rk4_symbolic(x, u, dt):
    k1 = _dynamics(x, u)
    k2 = _dynamics(x + 0.5 * dt * k1, u)
    k3 = _dynamics(x + 0.5 * dt * k2, u)
    k4 = _dynamics(x + dt * k3, u)
    return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _wheel_velocity(x, w):
    """Body-frame velocity of the wheel at ``w``."""
    c, s = cs.cos(x[2]), cs.sin(x[2])
    vbx = c * x[3] + s * x[4]
    vby = -s * x[3] + c * x[4]
    return vbx - x[5] * w[1], vby + x[5] * w[0]


def _wheel_accel(x, u, w):
    c, s = cs.cos(x[2]), cs.sin(x[2])
    omega2 = x[5] ** 2
    rwx, rwy = c * w[0] - s * w[1], s * w[0] + c * w[1]
    kwx, kwy = -s * w[0] - c * w[1], c * w[0] - s * w[1]
    return u[0] - omega2 * rwx + u[2] * kwx, u[1] - omega2 * rwy + u[2] * kwy


class TrajectoryTranscription:
    """
    Opti model of one OptProblem.

    Args:
        problem: Program constants
        options: Solver settings
    """

    def __init__(self, problem: OptProblem, options: SolverOptions = SolverOptions()):
        self.problem = problem
        self.options = options
        self.opti = cs.Opti()
        self._build()

    # ============================================
    # Model
    # ============================================

    def _build(self) -> None:
        p = self.problem
        opti = self.opti
        H = p.horizon
        layout = p.layout
        limits = p.limits
        positions = layout.positions

        self.X = opti.variable(6, H)
        self.U = opti.variable(3, H - 1)
        self.DT = opti.variable(H - 1)
        X, U, DT = self.X, self.U, self.DT

        # Continuity
        for h in range(H - 1):
            opti.subject_to(X[:, h + 1] == rk4_symbolic(X[:, h], U[:, h], DT[h]))

        # Boundary states
        opti.subject_to(X[:, 0] == cs.DM(p.start))
        opti.subject_to(X[:, H - 1] == cs.DM(p.goal))

        # Time steps and body limits
        opti.subject_to(opti.bounded(limits.dt_min, DT, limits.dt_max))
        bounds = limits.accel_bounds
        for row in range(3):
            opti.subject_to(opti.bounded(-bounds[row], U[row, :], bounds[row]))
        opti.subject_to(opti.bounded(-limits.max_yaw_rate, X[5, :], limits.max_yaw_rate))
        for h in range(1, H - 1):
            opti.subject_to(X[3, h] ** 2 + X[4, h] ** 2 <= limits.max_speed**2)

        pinned = p.rest_pinned()
        for h in range(1, H - 1):
            if p.keyframes[h]:
                opti.subject_to(X[3:6, h] == 0)

        # Wheels
        velocities = [[_wheel_velocity(X[:, h], positions[w]) for w in range(layout.count)] for h in range(H)]
        for h in range(H):
            if pinned[h]:
                continue
            for w in range(layout.count):
                vx, vy = velocities[h][w]
                opti.subject_to(vx**2 + vy**2 <= layout.max_speed[w] ** 2)
                self._steer_limit(vx, vy, int(p.flags[h, w]), layout.steer_lower[w], layout.steer_upper[w])

        for h in range(H - 1):
            if pinned[h] or pinned[h + 1]:
                continue
            for w in range(layout.count):
                vx0, vy0 = velocities[h][w]
                vx1, vy1 = velocities[h + 1][w]
                sign = float(p.flags[h, w] * p.flags[h + 1, w])
                dot = sign * (vx0 * vx1 + vy0 * vy1)
                norms = cs.sqrt((vx0**2 + vy0**2) * (vx1**2 + vy1**2) + RATE_SQRT_EPS)
                opti.subject_to(dot - norms * cs.cos(layout.max_steer_rate[w] * DT[h]) >= 0)

        for h in range(H - 1):
            for w in range(layout.count):
                ax, ay = _wheel_accel(X[:, h], U[:, h], positions[w])
                opti.subject_to(ax**2 + ay**2 <= layout.max_accel[w] ** 2)

        # Objective
        ref = p.reference
        task = 0
        for h in range(H):
            task += (
                (X[0, h] - ref[h, 0]) ** 2
                + (X[1, h] - ref[h, 1]) ** 2
                + p.heading_weight * (X[2, h] - ref[h, 2]) ** 2
            )
        A = p.accel_weights
        effort = 0
        for h in range(H - 1):
            effort += (A[0] * U[0, h] ** 2 + A[1] * U[1, h] ** 2 + A[2] * U[2, h] ** 2) * DT[h]
        opti.minimize(p.task_weight * task + effort + cs.sum1(DT))

        logger.debug(
            f"Transcription: H={H}, variables={opti.nx}, constraints={opti.ng}, "
            f"pinned={int(np.sum(pinned))}"
        )

    def _steer_limit(self, vx, vy, flag: int, lower: float, upper: float) -> None:
        span = upper - lower
        if span > math.pi:
            return
        dvx, dvy = flag * vx, flag * vy
        if span < math.pi:
            cross_upper = dvx * math.sin(upper) - dvy * math.cos(upper)
            cross_lower = dvx * math.sin(lower) - dvy * math.cos(lower)
            self.opti.subject_to(cross_upper * cross_lower <= 0)
        mid = 0.5 * (lower + upper)
        self.opti.subject_to(dvx * math.cos(mid) + dvy * math.sin(mid) >= 0)

    # ============================================
    # Solve
    # ============================================

    def set_initial(self, values: TrajectoryValues) -> None:
        limits = self.problem.limits
        self.opti.set_initial(self.X, values.states.T)
        self.opti.set_initial(self.U, values.controls.T)
        self.opti.set_initial(self.DT, np.clip(values.dts, limits.dt_min, limits.dt_max))

    def solve(self, warm: TrajectoryValues) -> TranscriptionResult:
        """
        Run IPOPT from ``warm``.

        A solver failure is not raised here: the last iterate is returned with
        ``success == False`` and IPOPT's return status.
        """
        opts = self.options
        self.set_initial(warm)
        plugin_opts = {"expand": True, "print_time": False, "detect_simple_bounds": True}
        ipopt_opts = {
            "max_iter": opts.max_iter,
            "tol": opts.opt_tol,
            "constr_viol_tol": 0.1 * opts.feas_tol,
            "acceptable_constr_viol_tol": 0.1 * opts.feas_tol,
            "bound_relax_factor": 0.0,
            "print_level": opts.print_level,
            "sb": "yes",
        }
        self.opti.solver("ipopt", plugin_opts, ipopt_opts)

        try:
            sol = self.opti.solve()
            values = self._values(sol.value)
            success = True
        except RuntimeError as e:
            logger.warning(f"IPOPT stopped without success: {e}")
            values = self._values(self.opti.debug.value)
            success = False

        stats = self.opti.stats()
        status = str(stats.get("return_status", "unknown"))
        iterations = int(stats.get("iter_count", 0))
        logger.info(f"IPOPT: status={status}, iterations={iterations}")
        return TranscriptionResult(values=values, status=status, iterations=iterations, success=success)

    def _values(self, value) -> TrajectoryValues:
        H = self.problem.horizon
        states = np.asarray(value(self.X), dtype=float).reshape(6, H).T
        controls = np.asarray(value(self.U), dtype=float).reshape(3, H - 1).T
        dts = np.asarray(value(self.DT), dtype=float).reshape(H - 1)
        return TrajectoryValues(states=states, controls=controls, dts=dts)

    # ============================================
    # Derivatives
    # ============================================

    def nlp_functions(self) -> dict[str, cs.Function]:
        """
        CasADi functions over the flat decision vector.

        Returns:
            ``f`` (objective), ``g`` (constraints), ``grad_f`` and ``jac_g``
        """
        x = self.opti.x
        f = self.opti.f
        g = self.opti.g
        return {
            "f": cs.Function("f", [x], [f]),
            "g": cs.Function("g", [x], [g]),
            "grad_f": cs.Function("grad_f", [x], [cs.gradient(f, x)]),
            "jac_g": cs.Function("jac_g", [x], [cs.jacobian(g, x)]),
        }

    def flat_vector(self, values: TrajectoryValues) -> np.ndarray:
        """Decision vector in Opti's variable order for ``values``."""
        self.set_initial(values)
        return np.asarray(self.opti.value(self.opti.x, self.opti.initial()), dtype=float).ravel()
