"""
CAWS Planner Test Configuration

Pytest fixtures and shared test utilities.
"""

import math

import pytest


def make_scenario(
    layout=None,
    start=(0.0, 0.0, 0.0),
    goal=(5.0, 0.0, 0.0),
    grid=None,
    limits=None,
    search=None,
    weights=None,
):
    """Scenario on a 20 m x 20 m empty map centered near the origin."""
    from caws_planner.kinematics.types import BodyState
    from caws_planner.world.grid import Footprint, OccupancyGrid
    from caws_planner.world.layouts import four_wheel_layout
    from caws_planner.world.scenario import Limits, Scenario, SearchConfig, Weights

    return Scenario(
        grid=grid or OccupancyGrid.empty(80, 80, 0.25, origin=(-5.0, -5.0)),
        layout=layout or four_wheel_layout(),
        footprint=Footprint(half_length=0.6, half_width=0.5),
        start=BodyState(*start),
        goal=BodyState(*goal),
        limits=limits or Limits(max_accel_x=2.0, max_accel_y=2.0),
        weights=weights or Weights(),
        search=search or SearchConfig(),
    )


def integrate(layout, start, controls, dts, phases=None, flags=None):
    """
    Trajectory that replays ``controls`` exactly.

    Single phase with forward flags unless ``phases`` (per knot) and ``flags``
    (per knot, one value for every wheel) are given.
    """
    import numpy as np

    from caws_planner.optimizer.residuals import rk4_array
    from caws_planner.search.trajectory import Trajectory, build_knots

    states = [np.asarray(start, dtype=float)]
    for u, dt in zip(controls, dts):
        states.append(rk4_array(states[-1], np.asarray(u, dtype=float), dt))
    states = np.array(states)
    if flags is None:
        flags = [1] * len(states)
    knots = build_knots(
        states,
        np.vstack([np.asarray(controls, dtype=float).reshape(-1, 3), np.zeros((1, 3))]),
        np.concatenate([np.asarray(dts, dtype=float), [0.0]]),
        [0] * len(states) if phases is None else phases,
        np.repeat(np.asarray(flags, dtype=int)[:, None], layout.count, axis=1),
        layout,
    )
    return Trajectory(knots=knots, layout=layout)


def make_rest_to_rest():
    from caws_planner.world.layouts import omni_layout

    layout = omni_layout()
    scenario = make_scenario(layout=layout, goal=(2.0, 0.0, 0.0))
    controls = [(0.5, 0.0, 0.0)] * 4 + [(-0.5, 0.0, 0.0)] * 4
    traj = integrate(layout, [0.0] * 6, controls, [0.5] * 8)
    return scenario, traj


@pytest.fixture
def rest_to_rest():
    """
    Omni chassis, (0, 0, 0) -> (2, 0, 0) at rest: 2 s at +0.5 m/s^2, then 2 s at -0.5 m/s^2.

    Returns:
        ``(scenario, trajectory)``; the trajectory satisfies every residual family
    """
    return make_rest_to_rest()


@pytest.fixture(scope="session")
def rest_to_rest_nlp():
    """
    CasADi functions of the rest-to-rest program, built once.

    Returns:
        ``(transcription, functions, x0)`` with ``x0`` the flat warm start
    """
    from caws_planner.optimizer import OptProblem, TrajectoryTranscription, TrajectoryValues

    scenario, traj = make_rest_to_rest()
    transcription = TrajectoryTranscription(OptProblem.from_trajectory(traj, scenario))
    x0 = transcription.flat_vector(TrajectoryValues.from_trajectory(traj))
    return transcription, transcription.nlp_functions(), x0


@pytest.fixture
def shuttle():
    """
    Omni chassis driving 0.8 m forward, stopping, then 0.4 m back to (0.4, 0, 0).

    The stop is a keyframe pair ``dt_min`` apart: phase 0 rolls forward, phase 1
    rolls backward with the same steering.

    Returns:
        ``(scenario, trajectory)``; the trajectory satisfies every residual family
    """
    from caws_planner.world.layouts import omni_layout

    layout = omni_layout()
    scenario = make_scenario(layout=layout, goal=(0.4, 0.0, 0.0))
    forward = [(0.8, 0.0, 0.0)] * 2 + [(-0.8, 0.0, 0.0)] * 2
    backward = [(-0.4, 0.0, 0.0)] * 2 + [(0.4, 0.0, 0.0)] * 2
    controls = forward + [(0.0, 0.0, 0.0)] + backward
    dts = [0.5] * 4 + [scenario.limits.dt_min] + [0.5] * 4
    traj = integrate(layout, [0.0] * 6, controls, dts, phases=[0] * 5 + [1] * 5, flags=[1] * 5 + [-1] * 5)
    return scenario, traj


@pytest.fixture
def four_wheel():
    """Front wheels +-90 deg, rear wheels +-75 deg."""
    from caws_planner.world.layouts import four_wheel_layout

    return four_wheel_layout()


@pytest.fixture
def omni():
    from caws_planner.world.layouts import omni_layout

    return omni_layout()


@pytest.fixture
def bicycle():
    from caws_planner.world.layouts import bicycle_layout

    return bicycle_layout()


@pytest.fixture
def empty_grid():
    from caws_planner.world.grid import OccupancyGrid

    return OccupancyGrid.empty(80, 80, 0.25, origin=(-5.0, -5.0))


@pytest.fixture
def footprint():
    from caws_planner.world.grid import Footprint

    return Footprint(half_length=0.6, half_width=0.5)


@pytest.fixture
def scenario_factory():
    """Callable building test scenarios; see ``make_scenario``."""
    return make_scenario


@pytest.fixture
def straight_scenario():
    """Omni chassis, (0, 0, 0) -> (5, 0, 0)."""
    from caws_planner.world.layouts import omni_layout

    return make_scenario(layout=omni_layout())


@pytest.fixture
def turn_scenario():
    """Omni chassis, (0, 0, 0) -> (5, 5, 90 deg)."""
    from caws_planner.world.layouts import omni_layout

    return make_scenario(layout=omni_layout(), goal=(5.0, 5.0, math.pi / 2))


@pytest.fixture
def constrained_turn_scenario():
    """Front +-90 deg / rear +-75 deg chassis on the 90 deg turn."""
    from caws_planner.world.layouts import four_wheel_layout

    return make_scenario(layout=four_wheel_layout(), goal=(5.0, 5.0, math.pi / 2))


@pytest.fixture
def bicycle_scenario():
    """Car-like chassis, 45 deg left arc of radius 4 m about the rear axle."""
    from caws_planner.world.layouts import bicycle_layout

    angle = math.radians(45.0)
    return make_scenario(
        layout=bicycle_layout(),
        goal=(4.0 * math.sin(angle), 4.0 * (1.0 - math.cos(angle)), angle),
    )


@pytest.fixture
def scenario_toml():
    """Minimal scenario document text."""
    return """
[map]
resolution = 0.25
origin = [-5.0, -5.0]
width = 80
height = 80

[robot]
wheels = [[0.5, 0.4], [0.5, -0.4], [-0.5, 0.4], [-0.5, -0.4]]
steer_lower_deg = [-90.0, -90.0, -75.0, -75.0]
steer_upper_deg = [90.0, 90.0, 75.0, 75.0]
half_length = 0.6
half_width = 0.5

[limits]
max_accel_x = 2.0
max_accel_y = 2.0

[start]
x = 0.0
y = 0.0

[goal]
x = 5.0
y = 0.0
"""


@pytest.fixture
def integrator():
    """Callable replaying controls into a trajectory; see ``integrate``."""
    return integrate
