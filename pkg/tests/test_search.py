"""
Tests for caws_planner.search.

Covers:
- ICM sampling and wheel feasibility
- Maneuvers and the analytic goal shot
- Time costs and heuristic
- Hybrid-A* end to end
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st


class TestSampling:
    """Tests for the spherical ICM grid."""

    def test_eps_values(self):
        """Test the eps axis at i = 0, 4 and 8."""
        from caws_planner.search import sample_icm_grid

        samples = sample_icm_grid(n_eps=8, sampling_offset=1e-3)
        assert len(samples.eps_values) == 9
        assert samples.eps_values[4] == pytest.approx(0.78546, abs=1e-4)
        assert samples.eps_values[0] == pytest.approx(6.25e-5, rel=1e-2)
        assert 1.5 < samples.eps_values[8] < math.pi / 2

    def test_psi_and_omega_axes(self):
        """Test psi spans [-pi, pi] and omega is uniform over the range."""
        from caws_planner.search import sample_icm_grid

        samples = sample_icm_grid(n_psi=8, n_omega=8, omega_max=math.pi / 2)
        assert samples.psi_values[0] == pytest.approx(-math.pi)
        assert samples.psi_values[-1] == pytest.approx(math.pi)
        assert len(samples.omega_values) == 8
        assert samples.omega_values[0] == pytest.approx(-math.pi / 2)
        assert samples.omega_values[-1] == pytest.approx(math.pi / 2)

    def test_radii_drop_duplicate_column(self):
        """Test psi = -pi and psi = pi are not both kept."""
        from caws_planner.search import sample_icm_grid

        eps, psi, r = sample_icm_grid(n_eps=8, n_psi=8).radii()
        assert len(r) == 9 * 8
        assert len(eps) == len(psi) == len(r)

    def test_icm_from_spherical_unit_radius(self):
        """Test eps ~ pi/4, psi = 0 is the unit radius behind the center."""
        from caws_planner.search import icm_from_spherical, sample_icm_grid

        eps = sample_icm_grid().eps_values[4]
        assert np.allclose(icm_from_spherical(eps, 0.0), [-1.0, 0.0], atol=1e-3)

    @given(
        eps=st.floats(min_value=1e-3, max_value=1.5),
        psi=st.floats(min_value=-3.14, max_value=3.14),
    )
    def test_spherical_round_trip(self, eps, psi):
        """Test spherical_from_icm inverts icm_from_spherical."""
        from caws_planner.search import icm_from_spherical, spherical_from_icm

        back_eps, back_psi = spherical_from_icm(icm_from_spherical(eps, psi))
        assert back_eps == pytest.approx(eps, abs=1e-9)
        assert back_psi == pytest.approx(psi, abs=1e-9)

    def test_spherical_origin(self):
        """Test the origin maps to (0, 0)."""
        from caws_planner.search import spherical_from_icm

        assert spherical_from_icm((0.0, 0.0)) == (0.0, 0.0)


class TestFeasible:
    """Tests for feasible / resolve_wheels."""

    def test_spot_rotation(self, omni):
        """Test spot rotation on a square +-90 deg chassis: every wheel tangential."""
        from caws_planner.search import feasible, resolve_wheels

        assert feasible((0.0, 0.0), omni) is not None
        steer, _ = resolve_wheels((0.0, 0.0, 1.0), omni)
        for (wx, wy), angle in zip(omni.wheels, steer):
            assert math.cos(angle) * wx + math.sin(angle) * wy == pytest.approx(0.0, abs=1e-12)
            assert abs(angle) <= math.pi / 2

    def test_bicycle_off_axle(self, bicycle):
        """Test an ICM off the rear axle line is infeasible for locked rear wheels."""
        from caws_planner.search import feasible

        assert feasible((0.0, -4.0), bicycle) is not None
        assert feasible((0.5, -4.0), bicycle) is None

    def test_narrow_limits_exclude_band(self, omni):
        """Test an ICM level with a wheel needs 90 deg steering."""
        from caws_planner.search import feasible
        from caws_planner.world import four_wheel_layout

        narrow = four_wheel_layout(front_limit_deg=60.0, rear_limit_deg=60.0)
        r = (-3.0, -0.4)
        assert feasible(r, omni) is not None
        assert feasible(r, narrow) is None

    def test_backward_flags(self, four_wheel):
        """Test a wheel whose forward angle is out of range rolls backward."""
        from caws_planner.search import resolve_wheels

        steer, flags = resolve_wheels((-1.0, 0.0, 0.0), four_wheel)
        assert np.all(flags == -1)
        assert np.allclose(steer, 0.0, atol=1e-12)


class TestManeuvers:
    """Tests for forward_simulate and the maneuver library."""

    def test_quarter_turn(self, omni):
        """Test rotating about an ICM 1 m to the left for a quarter turn."""
        from caws_planner.kinematics import BodyState
        from caws_planner.search import forward_simulate

        _, successor = forward_simulate(BodyState(), (0.0, -1.0), math.pi / 2, 1.0, omni)
        assert np.allclose(successor.pose, (1.0, 1.0, math.pi / 2), atol=1e-12)

    def test_spot_rotation(self, omni):
        """Test a spot rotation keeps the position."""
        from caws_planner.kinematics import BodyState
        from caws_planner.search import forward_simulate

        maneuver, successor = forward_simulate(BodyState(), (0.0, 0.0), 1.0, 0.5, omni)
        assert np.allclose(successor.pose, (0.0, 0.0, 0.5), atol=1e-12)
        assert maneuver.arc_length == pytest.approx(0.0)

    def test_large_radius_is_translation(self, omni):
        """Test a huge radius with omega * |r| = 1 m/s travels ~1 m straight."""
        from caws_planner.kinematics import BodyState
        from caws_planner.search import forward_simulate

        _, successor = forward_simulate(BodyState(), (0.0, -1e6), 1e-6, 1.0, omni)
        assert successor.x == pytest.approx(1.0, abs=1e-6)
        assert successor.y == pytest.approx(0.0, abs=1e-6)

    def test_infeasible_twist_raises(self, bicycle):
        """Test a steering-limit violation raises ValueError."""
        from caws_planner.kinematics import BodyState
        from caws_planner.search import forward_simulate

        with pytest.raises(ValueError):
            forward_simulate(BodyState(), None, 0.0, 1.0, bicycle, translation=(0.0, 1.0))

    def test_library_respects_limits(self, four_wheel, footprint):
        """Test every library maneuver honors speed, yaw rate, arc cap and steering limits."""
        from caws_planner.search import ManeuverLibrary, sample_icm_grid

        samples = sample_icm_grid()
        lib = ManeuverLibrary.build(samples, four_wheel, footprint, 0.25, 1.0, math.pi / 3, 0.5)
        assert len(lib) > 0
        speed = np.hypot(lib.twists[:, 0], lib.twists[:, 1])
        assert np.all(speed <= 1.0 + 1e-9)
        assert np.all(np.abs(lib.twists[:, 2]) <= math.pi / 3 + 1e-9)
        assert np.all(lib.arc_lengths <= samples.arc_length_cap + 1e-9)
        assert np.all(lib.durations <= 0.5 + 1e-12)
        assert np.all(lib.steer >= four_wheel.lower - 1e-9)
        assert np.all(lib.steer <= four_wheel.upper + 1e-9)
        wheel = np.abs(lib.speed)
        assert np.all(wheel <= np.asarray(four_wheel.max_speed) + 1e-9)

    def test_narrow_library_is_smaller(self, footprint):
        """Test tighter steering limits keep fewer maneuvers."""
        from caws_planner.search import ManeuverLibrary, sample_icm_grid
        from caws_planner.world import four_wheel_layout

        samples = sample_icm_grid()
        wide = ManeuverLibrary.build(
            samples, four_wheel_layout(front_limit_deg=90.0, rear_limit_deg=90.0), footprint, 0.25, 1.0, math.pi / 3, 0.5
        )
        narrow = ManeuverLibrary.build(
            samples,
            four_wheel_layout(front_limit_deg=60.0, rear_limit_deg=60.0),
            footprint,
            0.25,
            1.0,
            math.pi / 3,
            0.5,
        )
        assert 0 < len(narrow) < len(wide)


class TestGoalShot:
    """Tests for the analytic goal shot."""

    def test_straight_pieces(self, omni, footprint):
        """Test 5 m straight at 1 m/s with a 0.4 m arc cap is 13 equal pieces."""
        from caws_planner.search import goal_shot

        shot = goal_shot((0, 0, 0), (5, 0, 0), omni, footprint, 0.25, 1.0, math.pi / 3, 0.4, 0.5)
        assert len(shot.maneuvers) == 13
        assert shot.maneuvers[0].duration == pytest.approx(5.0 / 13)
        assert np.allclose(shot.poses[-1], (5.0, 0.0, 0.0))

    def test_quarter_circle(self, omni, footprint):
        """Test (0,0,0) -> (5,5,pi/2) is a quarter circle about (0, 5)."""
        from caws_planner.search import goal_shot

        shot = goal_shot((0, 0, 0), (5, 5, math.pi / 2), omni, footprint, 0.25, 1.0, math.pi / 3, 0.4, 0.5)
        assert len(shot.maneuvers) == 20
        assert np.allclose(shot.maneuvers[0].r, (0.0, -5.0), atol=1e-9)
        assert np.allclose(np.hypot(shot.sweep[:, 0], shot.sweep[:, 1] - 5.0), 5.0, atol=1e-9)
        assert np.allclose(shot.poses[-1], (5.0, 5.0, math.pi / 2))

    def test_unsteerable_shot(self, bicycle, footprint):
        """Test a sideways goal is rejected for a car-like chassis."""
        from caws_planner.search import goal_shot

        assert goal_shot((0, 0, 0), (0, 2, 0), bicycle, footprint, 0.25, 1.0, math.pi / 3, 0.4, 0.5) is None

    def test_nothing_to_do(self, omni, footprint):
        """Test the shot onto the current pose is None."""
        from caws_planner.search import goal_shot

        assert goal_shot((1, 1, 0), (1, 1, 0), omni, footprint, 0.25, 1.0, math.pi / 3, 0.4, 0.5) is None


class TestCosts:
    """Tests for step costs and the heuristic."""

    @pytest.fixture
    def unit_layout(self):
        from caws_planner.kinematics import WheelLayout

        return WheelLayout.uniform(
            [(0.5, 0.4), (-0.5, -0.4)], [-1.5, -1.5], [1.5, 1.5], max_speed=3.0, max_accel=2.0, max_steer_rate=1.0
        )

    def test_time_cost_value(self, unit_layout):
        """Test t_w = sqrt(0.5^2 + 0.3^2) dominates t_body = 0.5."""
        from caws_planner.search import time_costs

        cost = time_costs(
            np.zeros(2), np.zeros(2), np.array([0.3, 0.1]), np.array([1.0, 0.5]), 1.0, 0.2, unit_layout, 2.0, 1.0
        )
        assert cost[0] == pytest.approx(math.sqrt(0.34), abs=1e-12)
        assert cost[0] == pytest.approx(0.5831, abs=1e-4)

    def test_no_motion(self, unit_layout):
        """Test identical wheel states and no displacement cost nothing."""
        from caws_planner.search import time_costs

        steer = np.array([0.2, -0.1])
        speed = np.array([0.4, 0.4])
        assert time_costs(steer, speed, steer, speed, 0.0, 0.0, unit_layout, 2.0, 1.0)[0] == 0.0

    def test_zero_speed_weight(self, unit_layout):
        """Test k_vw = 0 leaves only the steering and body terms."""
        from caws_planner.search import time_costs

        cost = time_costs(
            np.zeros(2), np.zeros(2), np.array([0.3, 0.1]), np.array([1.0, 0.5]), 1.0, 0.2, unit_layout, 2.0, 1.0, k_vw=0.0
        )
        assert cost[0] == pytest.approx(max(0.3, 0.5))

    def test_step_cost_uses_node_fields(self, unit_layout):
        """Test step_cost on two search nodes."""
        from caws_planner.search import SearchNode, step_cost
        from caws_planner.world import Limits, Weights

        prev = SearchNode((0.0, 0.0, 0.0), (0, 0, 0), np.zeros(2), np.zeros(2), None, 0, 0.0, 0.0)
        nxt = SearchNode((1.0, 0.0, 0.2), (0, 0, 0), np.array([0.3, 0.1]), np.array([1.0, 0.5]), (1, 1), 0, 0.0, 0.0)
        limits = Limits(max_speed=2.0, max_yaw_rate=1.0)
        assert step_cost(prev, nxt, unit_layout, limits, Weights()) == pytest.approx(math.sqrt(0.34))

    def test_heuristic_values(self):
        """Test distance- and rotation-dominated estimates."""
        from caws_planner.search import heuristic
        from caws_planner.world import Limits

        limits = Limits(max_speed=2.0, max_yaw_rate=0.5)
        assert heuristic((0.0, 0.0, 0.3), (3.0, 4.0, 0.3), limits) == pytest.approx(2.5)
        assert heuristic((3.0, 4.0, 0.3), (3.0, 4.0, 0.3), limits) == 0.0
        assert heuristic((1.0, 1.0, 0.0), (1.0, 1.0, 1.0), limits) == pytest.approx(2.0)
        assert heuristic((1.0, 1.0, 0.0), (1.0, 1.0, 1.0), limits, k_h=2.0) == pytest.approx(4.0)

    def test_heuristic_wraps_heading(self):
        """Test the heading error is measured the short way round."""
        from caws_planner.search import heuristic
        from caws_planner.world import Limits

        limits = Limits(max_speed=1.0, max_yaw_rate=1.0)
        assert heuristic((0.0, 0.0, 3.0), (0.0, 0.0, -3.0), limits) == pytest.approx(2 * math.pi - 6.0)


class TestPlanner:
    """Tests for the Hybrid-A* planner."""

    def test_straight(self, straight_scenario):
        """Test the straight query is answered by the goal shot from the start."""
        from caws_planner.search import plan

        traj = plan(straight_scenario)
        assert len(traj) == 14
        assert traj.nodes_expanded == 1
        assert traj.total_time == pytest.approx(5.0, rel=0.2)
        assert np.allclose(traj.states[0], straight_scenario.start.as_array())
        assert np.allclose(traj.states[-1], [5.0, 0.0, 0.0, 0.0, 0.0, 0.0], atol=1e-9)
        assert np.allclose(traj.steer, 0.0, atol=1e-12)
        assert traj.dts[-1] == 0.0

    def test_quarter_turn(self, turn_scenario):
        """Test the 90 deg query ends within the goal tolerance."""
        from caws_planner.search import plan

        traj = plan(turn_scenario)
        last = traj.states[-1]
        assert math.hypot(last[0] - 5.0, last[1] - 5.0) <= 0.2
        assert abs(last[2] - math.pi / 2) <= 0.1
        assert np.all(traj.dts[:-1] > 0)

    def test_constrained_steering_stays_in_limits(self, constrained_turn_scenario):
        """Test every knot's steering lies in the +-90/+-75 deg limits."""
        from caws_planner.search import plan

        scenario = constrained_turn_scenario
        traj = plan(scenario)
        assert np.all(traj.steer >= scenario.layout.lower - 1e-9)
        assert np.all(traj.steer <= scenario.layout.upper + 1e-9)

    def test_bicycle_arc(self, bicycle_scenario):
        """Test the car-like query is a single arc with locked rear wheels."""
        from caws_planner.search import plan

        traj = plan(bicycle_scenario)
        steer = traj.steer
        assert np.allclose(steer[:, 2:], 0.0, atol=1e-9)
        assert np.degrees(np.max(np.abs(steer[1:-1, :2]))) == pytest.approx(15.5, abs=0.5)

    def test_goal_equals_start(self, scenario_factory):
        """Test a null query returns a single knot."""
        from caws_planner.search import plan

        traj = plan(scenario_factory(goal=(0.0, 0.0, 0.0)))
        assert len(traj) == 1
        assert traj.total_time == 0.0
        assert traj.nodes_expanded == 0

    def test_no_path(self, scenario_factory):
        """Test a wall between start and goal exhausts a small budget."""
        from caws_planner.errors import NoPath
        from caws_planner.search import plan
        from caws_planner.world import OccupancyGrid, SearchConfig

        grid = OccupancyGrid.empty(24, 12, 0.25).with_occupied([(3.0, 0.0, 3.25, 3.0)])
        scenario = scenario_factory(
            grid=grid, start=(1.5, 1.5, 0.0), goal=(4.6, 1.5, 0.0), search=SearchConfig(max_expansions=200)
        )
        with pytest.raises(NoPath) as exc_info:
            plan(scenario)
        assert exc_info.value.nodes_expanded <= 200
        assert exc_info.value.exit_status == 4

    def test_deterministic(self, constrained_turn_scenario):
        """Test two runs give identical knots."""
        from caws_planner.search import plan

        first = plan(constrained_turn_scenario)
        second = plan(constrained_turn_scenario)
        assert np.array_equal(first.states, second.states)
        assert np.array_equal(first.dts, second.dts)
        assert np.array_equal(first.flags, second.flags)

    def test_callback_hooks(self, straight_scenario):
        """Test the callback sees the expansion and the goal."""
        from caws_planner.search import plan

        class Recorder:
            def __init__(self):
                self.expanded = []
                self.goal = None

            def on_expand(self, expanded, g, h, open_size):
                self.expanded.append(expanded)

            def on_goal(self, expanded, total_time, via_shot):
                self.goal = (expanded, via_shot)

            def on_error(self, error):
                raise AssertionError(error)

        recorder = Recorder()
        plan(straight_scenario, callback=recorder)
        assert recorder.expanded == [1]
        assert recorder.goal == (1, True)

    @pytest.mark.slow
    def test_detour_around_obstacle(self, scenario_factory):
        """Test a blocked straight line is solved by search, collision-free, with phase invariants."""
        from caws_planner.search import plan
        from caws_planner.world import ClearanceMap, OccupancyGrid, SearchConfig, omni_layout

        grid = OccupancyGrid.empty(80, 80, 0.25, origin=(-5.0, -5.0)).with_occupied([(2.25, -0.75, 2.75, 0.75)])
        scenario = scenario_factory(
            layout=omni_layout(), grid=grid, search=SearchConfig(n_eps=4, n_psi=8, n_omega=4)
        )
        traj = plan(scenario)
        assert traj.nodes_expanded > 1
        assert not ClearanceMap(grid, scenario.footprint).any_collision(traj.states[:, :3])
        last = traj.states[-1]
        assert math.hypot(last[0] - 5.0, last[1]) <= 0.2

        phases = traj.phases
        for h in range(len(traj) - 1):
            if phases[h + 1] == phases[h]:
                assert np.array_equal(traj.flags[h], traj.flags[h + 1])
            else:
                assert np.allclose(traj.states[h, 3:], 0.0)
                assert np.allclose(traj.states[h + 1, 3:], 0.0)
