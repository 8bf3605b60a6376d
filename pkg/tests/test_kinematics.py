"""
Tests for caws_planner.kinematics.

Covers:
- Rotation and its derivative
- ICM radius and its inverse
- Wheel velocity, steering and acceleration
- Frame and rigidity properties, including seeded bulk checks
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)


class TestRotation:
    """Tests for rotation and omega_matrix."""

    @pytest.mark.parametrize(
        "theta, expected",
        [
            (0.0, [[1, 0], [0, 1]]),
            (math.pi / 2, [[0, -1], [1, 0]]),
            (math.pi, [[-1, 0], [0, -1]]),
        ],
    )
    def test_rotation_values(self, theta, expected):
        """Test identity, quarter and half turn."""
        from caws_planner.kinematics import rotation

        assert np.allclose(rotation(theta), expected, atol=1e-15)

    def test_omega_matrix_values(self):
        """Test K(theta) * omega at a few angles."""
        from caws_planner.kinematics import omega_matrix

        assert np.allclose(omega_matrix(0.0, 1.0), [[0, -1], [1, 0]])
        assert np.allclose(omega_matrix(1.234, 0.0), np.zeros((2, 2)))
        assert np.allclose(omega_matrix(math.pi / 2, 2.0), [[-2, 0], [0, -2]], atol=1e-15)

    @given(theta=angles, omega=finite)
    def test_omega_matrix_is_rotation_derivative(self, theta, omega):
        """Test omega_matrix against a central difference of R(theta)."""
        from caws_planner.kinematics import omega_matrix, rotation

        h = 1e-6
        numeric = (rotation(theta + omega * h) - rotation(theta - omega * h)) / (2 * h)
        assert np.allclose(omega_matrix(theta, omega), numeric, atol=1e-6)

    def test_wrap_angle_range(self):
        """Test wrapping into (-pi, pi]."""
        from caws_planner.kinematics import wrap_angle

        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
        assert np.allclose(wrap_angle(np.array([0.0, 2 * math.pi])), [0.0, 0.0], atol=1e-12)


class TestIcm:
    """Tests for icm_radius and body_velocity_from_icm."""

    def test_icm_radius_values(self):
        """Test hand-evaluated radii."""
        from caws_planner.kinematics import BodyState, icm_radius

        assert np.allclose(icm_radius(BodyState(vx=1.0, omega=1.0)).r, [0.0, -1.0])
        state = BodyState(theta=math.pi / 2, vx=1.0, omega=2.0)
        assert np.allclose(icm_radius(state).r, [-0.5, 0.0], atol=1e-15)

    def test_icm_radius_singular(self):
        """Test pure translation raises SingularIcm."""
        from caws_planner.errors import SingularIcm
        from caws_planner.kinematics import BodyState, icm_radius

        with pytest.raises(SingularIcm):
            icm_radius(BodyState(vx=1.0, omega=0.0))

    def test_body_velocity_from_icm_values(self):
        """Test the inverse map on hand-evaluated cases."""
        from caws_planner.kinematics import IcmRadius, body_velocity_from_icm

        assert np.allclose(body_velocity_from_icm(IcmRadius(np.array([0.0, -1.0])), 1.0, 0.0), [1.0, 0.0])
        assert np.allclose(body_velocity_from_icm(IcmRadius(np.zeros(2)), 3.0, 0.7), [0.0, 0.0])
        result = body_velocity_from_icm(IcmRadius(np.array([1.0, 0.0])), 2.0, math.pi / 2)
        assert np.allclose(result, [-2.0, 0.0], atol=1e-15)

    @given(theta=angles, vx=finite, vy=finite, omega=finite)
    def test_round_trip(self, theta, vx, vy, omega):
        """Test body_velocity_from_icm(icm_radius(x)) reproduces the velocity."""
        from caws_planner.kinematics import BodyState, body_velocity_from_icm, icm_radius

        assume(abs(omega) > 1e-2)
        state = BodyState(theta=theta, vx=vx, vy=vy, omega=omega)
        v = body_velocity_from_icm(icm_radius(state), omega, theta)
        assert np.allclose(v, [vx, vy], atol=1e-9)


class TestWheelVelocity:
    """Tests for wheel_velocity and steering_halfangle."""

    def test_rotating_body(self):
        """Test a wheel 2 m ahead of a turning body."""
        from caws_planner.kinematics import BodyState, wheel_velocity

        motion = wheel_velocity(BodyState(vx=1.0, omega=1.0), (2.0, 0.0))
        assert np.allclose(motion.v_world, [1.0, 2.0])
        assert np.allclose(motion.v_body, [1.0, 2.0])
        assert motion.steer_world == pytest.approx(math.atan2(2.0, 1.0))
        assert motion.steer_world == pytest.approx(1.1071487, abs=1e-6)

    def test_aligned_wheel(self):
        """Test a wheel moving along the body heading steers 0."""
        from caws_planner.kinematics import BodyState, wheel_velocity

        motion = wheel_velocity(BodyState(theta=math.pi / 2, vy=1.0), (1.0, 0.0))
        assert np.allclose(motion.v_world, [0.0, 1.0])
        assert np.allclose(motion.v_body, [1.0, 0.0], atol=1e-15)
        assert motion.steer_body == pytest.approx(0.0, abs=1e-12)

    def test_rest_holds_previous_steer(self):
        """Test a resting wheel reports an undefined, held steering angle."""
        from caws_planner.kinematics import BodyState, wheel_velocity

        motion = wheel_velocity(BodyState(), (0.3, -0.2), previous_steer=0.4)
        assert np.allclose(motion.v_world, [0.0, 0.0])
        assert not motion.steer_defined
        assert motion.steer_body == 0.4
        assert wheel_velocity(BodyState(), (0.3, -0.2)).steer_body == 0.0

    def test_backward_flag(self):
        """Test a backward-rolling wheel points opposite to its velocity."""
        from caws_planner.kinematics import BodyState, wheel_velocity

        motion = wheel_velocity(BodyState(vx=-1.0), (0.5, 0.4), direction=-1)
        assert motion.steer_body == pytest.approx(0.0, abs=1e-12)
        assert motion.speed == pytest.approx(-1.0)

    @pytest.mark.parametrize("v, expected", [((1.0, 1.0), math.pi / 4), ((0.0, 1.0), math.pi / 2)])
    def test_halfangle_values(self, v, expected):
        """Test the half-angle form on hand-evaluated cases."""
        from caws_planner.kinematics import steering_halfangle

        assert steering_halfangle(v) == pytest.approx(expected)

    def test_halfangle_degenerate(self):
        """Test velocity along -x raises DegenerateBackward."""
        from caws_planner.errors import DegenerateBackward
        from caws_planner.kinematics import steering_halfangle

        with pytest.raises(DegenerateBackward):
            steering_halfangle((-1.0, 0.0))

    @given(vx=finite, vy=finite)
    def test_halfangle_matches_atan2(self, vx, vy):
        """Test the half-angle form equals atan2 away from the -x axis."""
        from caws_planner.kinematics import steering_halfangle

        assume(math.hypot(vx, vy) + vx > 1e-6)
        assert steering_halfangle((vx, vy)) == pytest.approx(math.atan2(vy, vx), abs=1e-9)

    @given(theta=angles, vx=finite, vy=finite, omega=finite, wx=finite, wy=finite)
    def test_frame_norm(self, theta, vx, vy, omega, wx, wy):
        """Test world and body wheel velocities have the same norm."""
        from caws_planner.kinematics import BodyState, wheel_velocity

        motion = wheel_velocity(BodyState(theta=theta, vx=vx, vy=vy, omega=omega), (wx, wy))
        assert np.hypot(*motion.v_world) == pytest.approx(np.hypot(*motion.v_body), abs=1e-12)

    @given(theta=angles, vx=finite, vy=finite, omega=finite, a=st.tuples(finite, finite), b=st.tuples(finite, finite))
    def test_rigidity(self, theta, vx, vy, omega, a, b):
        """Test velocities of two body points agree along the segment joining them."""
        from caws_planner.kinematics import BodyState, rotation, wheel_velocity

        state = BodyState(theta=theta, vx=vx, vy=vy, omega=omega)
        va = wheel_velocity(state, a).v_world
        vb = wheel_velocity(state, b).v_world
        segment = rotation(theta) @ (np.array(a) - np.array(b))
        assert float(np.dot(va - vb, segment)) == pytest.approx(0.0, abs=1e-9)

    def test_wheel_states_vectorized(self, four_wheel):
        """Test wheel_states agrees with wheel_velocity per wheel."""
        from caws_planner.kinematics import BodyState, body_twist, wheel_states, wheel_velocity

        state = BodyState(theta=0.3, vx=0.4, vy=0.2, omega=0.5)
        steer, speed = wheel_states(body_twist(state), four_wheel.positions, [1, 1, 1, 1])
        for i, w in enumerate(four_wheel.wheels):
            motion = wheel_velocity(state, w)
            assert steer[i] == pytest.approx(motion.steer_body)
            assert speed[i] == pytest.approx(motion.speed)


class TestWheelAcceleration:
    """Tests for wheel_acceleration."""

    def test_centripetal_cancels(self):
        """Test the hand-evaluated centripetal case."""
        from caws_planner.kinematics import BodyControl, BodyState, wheel_acceleration

        result = wheel_acceleration(BodyState(omega=1.0), BodyControl(ax=1.0), (1.0, 0.0))
        assert np.allclose(result, [0.0, 0.0])

    def test_no_rotation(self):
        """Test without rotation the wheel shares the body acceleration."""
        from caws_planner.kinematics import BodyControl, BodyState, wheel_acceleration

        result = wheel_acceleration(BodyState(theta=0.8, vx=1.0), BodyControl(0.3, -0.7, 0.0), (0.5, 0.4))
        assert np.allclose(result, [0.3, -0.7])

    @settings(max_examples=50)
    @given(
        theta=angles,
        vel=st.tuples(finite, finite, finite),
        acc=st.tuples(finite, finite, finite),
        w=st.tuples(finite, finite),
    )
    def test_matches_finite_difference(self, theta, vel, acc, w):
        """Test against a central difference of the wheel velocity, h = 1e-4 s."""
        from caws_planner.kinematics import BodyControl, BodyState, wheel_acceleration, wheel_velocity

        h = 1e-4
        x = np.array([0.0, 0.0, theta, *vel])
        u = np.array(acc)

        def advanced(dt):
            pos = x[:3] + x[3:] * dt + 0.5 * u * dt**2
            return BodyState(*pos, *(x[3:] + u * dt))

        numeric = (
            wheel_velocity(advanced(h), w).v_world - wheel_velocity(advanced(-h), w).v_world
        ) / (2 * h)
        exact = wheel_acceleration(BodyState(*x), BodyControl(*u), w)
        scale = max(1.0, float(np.hypot(*exact)))
        assert np.max(np.abs(exact - numeric)) <= 1e-6 * scale


class TestBulkIdentities:
    """Kinematic identities over 10k seeded random states, checked as arrays."""

    SAMPLES = 10_000

    @pytest.fixture
    def samples(self):
        rng = np.random.default_rng(11)
        n = self.SAMPLES
        theta = rng.uniform(-math.pi, math.pi, n)
        velocity = rng.uniform(-2.0, 2.0, (n, 2))
        omega = rng.uniform(1e-3, 2.0, n) * rng.choice([-1.0, 1.0], n)
        wheels = rng.uniform(-1.0, 1.0, (n, 2))
        return theta, velocity, omega, wheels

    def test_icm_round_trip(self, samples):
        from caws_planner.kinematics import BodyState, body_velocity_from_icm, icm_radius

        theta, velocity, omega, _ = samples
        back = np.array(
            [
                body_velocity_from_icm(icm_radius(BodyState(0.0, 0.0, t, *v, o)), o, t)
                for t, v, o in zip(theta, velocity, omega)
            ]
        )
        assert np.max(np.abs(back - velocity)) <= 1e-10

    def test_halfangle_matches_atan2(self, samples):
        from caws_planner.kinematics import steering_halfangle, wrap_angle

        _, velocity, _, _ = samples
        keep = velocity[:, 0] > -np.hypot(velocity[:, 0], velocity[:, 1]) + 1e-6
        velocity = velocity[keep]
        half = np.array([steering_halfangle(v) for v in velocity])
        expected = np.arctan2(velocity[:, 1], velocity[:, 0])
        assert np.max(np.abs(wrap_angle(half - expected))) <= 1e-9

    def test_rigid_body_wheel_pairs(self, samples):
        """Test any two wheels have equal velocity components along the line joining them."""
        from caws_planner.kinematics import wheel_velocities_body

        theta, velocity, omega, wheels = samples
        rng = np.random.default_rng(12)
        partners = rng.uniform(-1.0, 1.0, wheels.shape)
        c, s = np.cos(theta), np.sin(theta)
        vx_b = c * velocity[:, 0] + s * velocity[:, 1]
        vy_b = -s * velocity[:, 0] + c * velocity[:, 1]
        pairs = np.array(
            [
                wheel_velocities_body((vx, vy, o), np.vstack([p, q]))
                for vx, vy, o, p, q in zip(vx_b, vy_b, omega, wheels, partners)
            ]
        )
        along = np.einsum("ij,ij->i", pairs[:, 0] - pairs[:, 1], wheels - partners)
        assert np.max(np.abs(along)) <= 1e-9

    def test_wheel_frames_agree(self, samples):
        """Test world and body wheel velocities share their norm and differ in steering by theta."""
        from caws_planner.kinematics import BodyState, wheel_velocity, wrap_angle

        theta, velocity, omega, wheels = samples
        motions = [
            wheel_velocity(BodyState(0.0, 0.0, t, *v, o), w) for t, v, o, w in zip(theta, velocity, omega, wheels)
        ]
        world = np.array([m.v_world for m in motions])
        body = np.array([m.v_body for m in motions])
        defined = np.array([m.steer_defined for m in motions])
        steer_world = np.array([m.steer_world for m in motions])
        steer_body = np.array([m.steer_body for m in motions])

        world_norm = np.hypot(world[:, 0], world[:, 1])
        body_norm = np.hypot(body[:, 0], body[:, 1])
        assert np.all(np.abs(world_norm - body_norm) <= 1e-12 * np.maximum(1.0, world_norm))
        assert np.allclose(steer_body[defined], wrap_angle(steer_world[defined] - theta[defined]), atol=1e-12)

    def test_wheel_acceleration_matches_finite_difference(self, samples):
        """Test 1000 wheel accelerations against central differences, h = 1e-4 s."""
        from caws_planner.kinematics import BodyControl, BodyState, wheel_acceleration, wheel_velocity

        theta, velocity, omega, wheels = (part[:1000] for part in samples)
        controls = np.random.default_rng(13).uniform(-2.0, 2.0, (1000, 3))
        h = 1e-4
        errors = []
        for t, v, o, w, u in zip(theta, velocity, omega, wheels, controls):
            x = np.array([0.0, 0.0, t, *v, o])

            def advanced(dt):
                pos = x[:3] + x[3:] * dt + 0.5 * u * dt**2
                return BodyState(*pos, *(x[3:] + u * dt))

            numeric = (wheel_velocity(advanced(h), w).v_world - wheel_velocity(advanced(-h), w).v_world) / (2 * h)
            exact = wheel_acceleration(BodyState(*x), BodyControl(*u), w)
            errors.append(np.max(np.abs(exact - numeric)) / max(1.0, float(np.hypot(*exact))))
        assert max(errors) <= 1e-6


class TestTypes:
    """Tests for value-type validation."""

    def test_state_rejects_nan(self):
        """Test non-finite state fields raise ValidationError."""
        from caws_planner.errors import ValidationError
        from caws_planner.kinematics import BodyState

        with pytest.raises(ValidationError):
            BodyState(x=float("nan"))

    def test_layout_rejects_inverted_bounds(self):
        """Test lower >= upper raises ValidationError naming the field."""
        from caws_planner.errors import ValidationError
        from caws_planner.kinematics import WheelLayout

        with pytest.raises(ValidationError) as exc_info:
            WheelLayout.uniform([(0.5, 0.0)], [0.5], [0.2], 1.0, 1.0, 1.0)
        assert exc_info.value.field.startswith("robot.steer_lower")
