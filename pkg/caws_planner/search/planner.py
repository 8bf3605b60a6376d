#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Time-cost Hybrid-A* over ICM maneuvers.

Nodes are expanded best-first on ``f = g + h`` (ties broken by ``h`` and then
insertion order). Each expansion applies every feasible maneuver of the library,
and, near the goal, tries the analytic goal shot first.
"""

import heapq
import logging
import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from caws_planner.errors import NoPath
from caws_planner.kinematics.rigid_body import body_twist, wheel_states, wrap_angle
from caws_planner.kinematics.types import BodyState
from caws_planner.search.callback import NoOpCallback, SearchCallback
from caws_planner.search.costs import heuristic, time_costs
from caws_planner.search.maneuvers import (
    GoalShot,
    Maneuver,
    ManeuverLibrary,
    compose,
    goal_shot,
    world_velocity,
)
from caws_planner.search.sampling import sample_icm_grid
from caws_planner.search.trajectory import InitialTrajectory, build_knots, finite_difference_controls
from caws_planner.world.grid import ClearanceMap
from caws_planner.world.scenario import Scenario

logger = logging.getLogger(__name__)

_STILL = 1e-9


@dataclass
class SearchNode:
    """
    Search state.

    ``direction_flags`` is None only on the start node, whose flags are those of
    the first maneuver taken from it.
    """

    pose: tuple[float, float, float]
    velocity: tuple[float, float, float]
    wheel_steer: np.ndarray
    wheel_speed: np.ndarray
    direction_flags: Optional[tuple[int, ...]]
    phase: int
    g: float
    h: float
    parent: Optional[int] = None
    maneuver: Optional[Maneuver] = None


class HybridAStarPlanner:
    """
    Hybrid-A* planner for one scenario.

    Args:
        scenario: Planning query
        callback: Progress hooks (optional)
    """

    def __init__(self, scenario: Scenario, callback: Optional[SearchCallback] = None):
        self.scenario = scenario
        self.callback = callback or NoOpCallback()
        cfg = scenario.search
        limits = scenario.limits
        self.step_max = min(cfg.max_step_duration, limits.dt_max)
        self.samples = sample_icm_grid(
            cfg.n_eps, cfg.n_psi, cfg.n_omega, cfg.omega_max, cfg.sampling_offset, cfg.arc_length_cap
        )
        self.library = ManeuverLibrary.build(
            self.samples,
            scenario.layout,
            scenario.footprint,
            scenario.grid.resolution,
            limits.max_speed,
            limits.max_yaw_rate,
            self.step_max,
        )
        self.clearance = ClearanceMap(scenario.grid, scenario.footprint)
        self.position_resolution = cfg.resolved_position_resolution(scenario.grid)
        self.heading_bin = 2.0 * math.pi / cfg.heading_bins
        self.goal_pose = np.array(scenario.goal.pose)

    # ============================================
    # Keys and goal test
    # ============================================

    def _keys(self, poses: np.ndarray, velocities: np.ndarray, flags: np.ndarray) -> list[tuple]:
        ox, oy = self.scenario.grid.origin
        ix = np.floor((poses[:, 0] - ox) / self.position_resolution).astype(int)
        iy = np.floor((poses[:, 1] - oy) / self.position_resolution).astype(int)
        it = np.floor((wrap_angle(poses[:, 2]) + math.pi) / self.heading_bin).astype(int)
        it %= self.scenario.search.heading_bins
        speed = np.hypot(velocities[:, 0], velocities[:, 1])
        octant = np.floor((np.arctan2(velocities[:, 1], velocities[:, 0]) + math.pi) / (math.pi / 4))
        octant = np.where(speed < _STILL, 8, octant.astype(int) % 8)
        return [
            (int(ix[k]), int(iy[k]), int(it[k]), int(octant[k]), tuple(int(f) for f in flags[k]))
            for k in range(len(poses))
        ]

    def at_goal(self, pose) -> bool:
        cfg = self.scenario.search
        dist = math.hypot(pose[0] - self.goal_pose[0], pose[1] - self.goal_pose[1])
        dtheta = abs(wrap_angle(self.goal_pose[2] - pose[2]))
        return dist <= cfg.goal_position_tolerance and dtheta <= cfg.goal_heading_tolerance

    # ============================================
    # Search
    # ============================================

    def plan(self) -> InitialTrajectory:
        """
        Run the search.

        Returns:
            InitialTrajectory from the start state to a pose within goal tolerance

        Raises:
            NoPath: Open list exhausted or expansion budget spent
        """
        scenario = self.scenario
        cfg = scenario.search
        start = scenario.start
        started = time.perf_counter()
        logger.info(
            f"Search: {start.pose} -> {scenario.goal.pose}, {len(self.library)} maneuvers, "
            f"budget {cfg.max_expansions}"
        )

        twist = body_twist(start)
        steer, speed = wheel_states(twist, scenario.layout.positions, np.ones(scenario.layout.count))
        root = SearchNode(
            pose=start.pose,
            velocity=(start.vx, start.vy, start.omega),
            wheel_steer=steer,
            wheel_speed=speed,
            direction_flags=None,
            phase=0,
            g=0.0,
            h=heuristic(start.pose, self.goal_pose, scenario.limits, scenario.weights.k_h),
        )
        nodes = [root]
        open_list: list[tuple[float, float, int, int]] = [(root.h, root.h, 0, 0)]
        counter = 1
        closed: set[tuple] = set()
        best_g: dict[tuple, float] = {}
        root_key = self._keys(np.array([root.pose]), np.array([root.velocity]), np.zeros((1, 0)))[0]
        keys = {0: root_key}
        expanded = 0

        while open_list:
            _, _, _, idx = heapq.heappop(open_list)
            key = keys[idx]
            if key in closed:
                continue
            closed.add(key)
            node = nodes[idx]

            if self.at_goal(node.pose):
                return self._finish(nodes, idx, None, expanded, started)

            if expanded >= cfg.max_expansions:
                logger.error(f"Search budget of {cfg.max_expansions} expansions spent")
                self.callback.on_error("expansion budget exhausted")
                raise NoPath("expansion budget exhausted", nodes_expanded=expanded)
            expanded += 1
            self.callback.on_expand(expanded, node.g, node.h, len(open_list))
            if expanded % 5000 == 0:
                logger.debug(f"expanded={expanded} open={len(open_list)} g={node.g:.3f} h={node.h:.3f}")

            distance = math.hypot(node.pose[0] - self.goal_pose[0], node.pose[1] - self.goal_pose[1])
            if distance <= cfg.shot_distance:
                shot = self._try_shot(node)
                if shot is not None:
                    return self._finish(nodes, idx, shot, expanded, started)

            for child in self._successors(node, idx, closed, best_g):
                child_node, child_key = child
                nodes.append(child_node)
                child_idx = len(nodes) - 1
                keys[child_idx] = child_key
                heapq.heappush(
                    open_list, (child_node.g + child_node.h, child_node.h, counter, child_idx)
                )
                counter += 1

        logger.error(f"Open list exhausted after {expanded} expansions")
        self.callback.on_error("open set exhausted")
        raise NoPath("open set exhausted", nodes_expanded=expanded)

    def _successors(self, node: SearchNode, idx: int, closed: set, best_g: dict):
        scenario = self.scenario
        lib = self.library
        if len(lib) == 0:
            return []
        poses = compose(node.pose, lib.deltas)
        velocities = world_velocity(poses[:, 2], lib.twists)
        keys = self._keys(poses, velocities, lib.flags)
        costs = time_costs(
            node.wheel_steer,
            node.wheel_speed,
            lib.steer,
            lib.speed,
            lib.arc_lengths,
            lib.deltas[:, 2],
            scenario.layout,
            scenario.limits.max_speed,
            scenario.limits.max_yaw_rate,
            scenario.weights.k_vw,
            scenario.weights.k_dw,
        )
        g = node.g + costs

        candidates = [
            m for m in range(len(lib)) if keys[m] not in closed and g[m] < best_g.get(keys[m], math.inf)
        ]
        if not candidates:
            return []
        sweep = compose(node.pose, lib.sweep[candidates])
        hits = self.clearance.poses_collide(sweep.reshape(-1, 3)).reshape(len(candidates), -1)
        free = [m for m, hit in zip(candidates, hits.any(axis=1)) if not hit]
        if not free:
            return []

        h = heuristic(poses[free], self.goal_pose, scenario.limits, scenario.weights.k_h)
        children = []
        for m, h_m in zip(free, np.atleast_1d(h)):
            if g[m] >= best_g.get(keys[m], math.inf):
                continue
            best_g[keys[m]] = float(g[m])
            flags = keys[m][4]
            phase = node.phase
            if node.direction_flags is not None and flags != node.direction_flags:
                phase += 1
            child = SearchNode(
                pose=tuple(float(v) for v in poses[m]),
                velocity=tuple(float(v) for v in velocities[m]),
                wheel_steer=lib.steer[m],
                wheel_speed=lib.speed[m],
                direction_flags=flags,
                phase=phase,
                g=float(g[m]),
                h=float(h_m),
                parent=idx,
                maneuver=lib.maneuvers[m],
            )
            children.append((child, keys[m]))
        return children

    def _try_shot(self, node: SearchNode) -> Optional[GoalShot]:
        scenario = self.scenario
        shot = goal_shot(
            node.pose,
            self.goal_pose,
            scenario.layout,
            scenario.footprint,
            scenario.grid.resolution,
            scenario.limits.max_speed,
            scenario.limits.max_yaw_rate,
            scenario.search.arc_length_cap,
            self.step_max,
        )
        if shot is None:
            return None
        if self.clearance.any_collision(shot.sweep):
            return None
        return shot

    # ============================================
    # Trajectory assembly
    # ============================================

    def _finish(self, nodes, idx, shot, expanded, started) -> InitialTrajectory:
        chain = []
        while idx is not None:
            chain.append(nodes[idx])
            idx = nodes[idx].parent
        chain.reverse()

        legs: list[tuple[np.ndarray, np.ndarray, Maneuver]] = [
            (np.array(n.pose), np.array(n.velocity), n.maneuver) for n in chain[1:]
        ]
        if shot is not None:
            for pose, maneuver in zip(shot.poses, shot.maneuvers):
                legs.append((pose, world_velocity(pose[2], maneuver.twist), maneuver))

        traj = self._assemble(legs, expanded)
        elapsed = time.perf_counter() - started
        logger.info(
            f"Search done: {len(traj)} knots, total_time={traj.total_time:.3f}s, "
            f"expanded={expanded}, shot={'yes' if shot is not None else 'no'}, {elapsed:.3f}s"
        )
        self.callback.on_goal(expanded, traj.total_time, shot is not None)
        return traj

    def _assemble(self, legs, expanded: int) -> InitialTrajectory:
        """
        Knots from the maneuver chain.

        A change of direction flags between two maneuvers becomes a stop: the
        boundary pose is emitted twice at zero velocity (old phase, then new
        phase), ``dt_min`` apart.
        """
        scenario = self.scenario
        layout = scenario.layout
        positions = layout.positions
        start = scenario.start
        first_flags = legs[0][2].direction_flags if legs else np.ones(layout.count, dtype=int)
        first_steer = legs[0][2].wheel_steer if legs else None

        steer0, speed0 = wheel_states(body_twist(start), positions, first_flags, first_steer)
        states = [start.as_array()]
        dts: list[float] = []
        phases = [0]
        flags = [np.asarray(first_flags, dtype=int)]
        steer = [steer0]
        speed = [speed0]
        phase = 0

        for k, (pose, velocity, maneuver) in enumerate(legs):
            if k > 0 and not np.array_equal(maneuver.direction_flags, flags[-1]):
                states[-1] = np.concatenate([states[-1][:3], np.zeros(3)])
                speed[-1] = np.zeros(layout.count)
                dts.append(scenario.limits.dt_min)
                phase += 1
                states.append(states[-1].copy())
                phases.append(phase)
                flags.append(np.asarray(maneuver.direction_flags, dtype=int))
                steer.append(np.asarray(maneuver.wheel_steer))
                speed.append(np.zeros(layout.count))
            dts.append(maneuver.duration)
            states.append(np.concatenate([pose, velocity]))
            phases.append(phase)
            flags.append(np.asarray(maneuver.direction_flags, dtype=int))
            steer.append(np.asarray(maneuver.wheel_steer))
            speed.append(np.asarray(maneuver.wheel_speed))
        dts.append(0.0)

        if legs:
            goal = scenario.goal
            last = states[-1]
            states[-1] = np.array([last[0], last[1], last[2], goal.vx, goal.vy, goal.omega])
            steer[-1], speed[-1] = wheel_states(
                body_twist(BodyState.from_array(states[-1])), positions, flags[-1], steer[-1]
            )

        states_arr = np.array(states)
        dts_arr = np.array(dts)
        knots = build_knots(
            states_arr,
            finite_difference_controls(states_arr, dts_arr),
            dts_arr,
            phases,
            np.array(flags),
            layout,
            np.array(steer),
            np.array(speed),
        )
        return InitialTrajectory(knots=knots, layout=layout, nodes_expanded=expanded)


def plan(scenario: Scenario, callback: Optional[SearchCallback] = None) -> InitialTrajectory:
    """Search an initial trajectory for ``scenario`` (see HybridAStarPlanner)."""
    return HybridAStarPlanner(scenario, callback).plan()
