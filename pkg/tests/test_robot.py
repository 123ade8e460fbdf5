import math

import pytest

from envrig.dynamics import compile_model
from envrig.engines import EngineHandle, EngineId, PhysicsState, engine_step
from envrig.errors import ControlModeError, JointNotFoundError, NotSupportedError
from envrig.registry import load_robot_model
from envrig.robot import ControlMode, MockRobot, PDGains, SimulatedRobot


@pytest.fixture
def cartpole_robot():
    model = load_robot_model("cartpole-balance")
    return SimulatedRobot(model, EngineHandle(compile_model(model), EngineId.EULER_SI))


@pytest.fixture
def pendulum_robot():
    model = load_robot_model("pendulum-swingup")
    return SimulatedRobot(model, EngineHandle(compile_model(model), EngineId.EULER_SI))


def test_joint_reads_at_upright_rest(cartpole_robot):
    assert cartpole_robot.joint_names() == ("cart_joint", "pole_joint")
    assert cartpole_robot.joint_position("pole_joint") == 0.0
    assert cartpole_robot.joint_velocity("cart_joint") == 0.0


def test_unknown_joint_is_a_lookup_error(cartpole_robot):
    with pytest.raises(JointNotFoundError) as err:
        cartpole_robot.joint_position("elbow")
    assert "elbow" in str(err.value)


def test_reads_between_advances_come_from_one_snapshot(cartpole_robot):
    cartpole_robot.set_joint_force("cart_joint", 5.0)
    cartpole_robot.advance_ticks(3, 1e-3)
    a = [cartpole_robot.joint_position("cart_joint") for _ in range(2)]
    b = [cartpole_robot.joint_velocity("cart_joint") for _ in range(2)]
    assert a[0] == a[1] and b[0] == b[1]


def test_force_is_clamped_to_effort_limit(cartpole_robot):
    cartpole_robot.set_joint_force("cart_joint", 1e9)
    cartpole_robot.advance_ticks(1, 1e-3)
    assert cartpole_robot.take_clamped() == ["cart_joint"]
    # The applied force must equal the 100 N limit exactly.
    model = load_robot_model("cartpole-balance")
    handle = EngineHandle(compile_model(model), EngineId.EULER_SI)
    expected = engine_step(EngineId.EULER_SI, handle.dyn, PhysicsState((0.0, 0.0), (0.0, 0.0)), (100.0, 0.0), 1e-3)
    assert cartpole_robot.physics_state == expected


def test_clamp_flags_clear_after_reading(cartpole_robot):
    cartpole_robot.set_joint_force("cart_joint", -1e9)
    cartpole_robot.advance_ticks(1, 1e-3)
    assert cartpole_robot.take_clamped() == ["cart_joint"]
    assert cartpole_robot.take_clamped() == []


def test_reference_latching_last_write_wins(cartpole_robot):
    cartpole_robot.set_joint_force("cart_joint", 50.0)
    cartpole_robot.set_joint_force("cart_joint", 10.0)
    cartpole_robot.advance_ticks(1, 1e-3)

    other = SimulatedRobot(
        load_robot_model("cartpole-balance"),
        EngineHandle(compile_model(load_robot_model("cartpole-balance")), EngineId.EULER_SI),
    )
    other.set_joint_force("cart_joint", 10.0)
    other.advance_ticks(1, 1e-3)
    assert cartpole_robot.physics_state == other.physics_state


def test_reference_held_as_zero_order_hold(cartpole_robot):
    cartpole_robot.set_joint_force("cart_joint", 10.0)
    cartpole_robot.advance_ticks(10, 1e-3)
    v10 = cartpole_robot.joint_velocity("cart_joint")
    cartpole_robot.advance_ticks(10, 1e-3)
    assert cartpole_robot.joint_velocity("cart_joint") > v10  # still pushing


def test_control_mode_mismatch_errors(cartpole_robot):
    with pytest.raises(ControlModeError):
        cartpole_robot.set_joint_position_target("cart_joint", 0.1, PDGains(10.0, 1.0))
    cartpole_robot.set_control_mode("cart_joint", ControlMode.POSITION_PD)
    with pytest.raises(ControlModeError):
        cartpole_robot.set_joint_force("cart_joint", 1.0)


def test_pd_reference_at_target_from_rest_is_a_fixed_point(pendulum_robot):
    pendulum_robot.set_control_mode("pivot", ControlMode.POSITION_PD)
    pendulum_robot.set_joint_position_target("pivot", 0.0, PDGains(50.0, 5.0))
    pendulum_robot.advance_ticks(5, 1e-3)
    assert pendulum_robot.joint_position("pivot") == 0.0
    assert pendulum_robot.joint_velocity("pivot") == 0.0


def test_pd_closed_loop_reaches_near_target(pendulum_robot):
    # kp=50, kd=5, target 0.2 rad from rest: after 5 s the pendulum settles
    # within 0.05 rad of the target (gravity offset included). The pre-build
    # oracle run measured a steady-state error of 0.0327 rad.
    pendulum_robot.set_control_mode("pivot", ControlMode.POSITION_PD)
    pendulum_robot.set_joint_position_target("pivot", 0.2, PDGains(50.0, 5.0))
    pendulum_robot.advance_ticks(5000, 1e-3)
    assert abs(pendulum_robot.joint_position("pivot") - 0.2) < 0.05
    assert abs(pendulum_robot.joint_velocity("pivot")) < 0.01


def test_pd_runs_at_physics_rate_not_agent_rate(pendulum_robot):
    # Two tick-granularity advances equal one long advance: the PD force is
    # recomputed every tick either way.
    pendulum_robot.set_control_mode("pivot", ControlMode.POSITION_PD)
    pendulum_robot.set_joint_position_target("pivot", 0.2, PDGains(50.0, 5.0))
    pendulum_robot.advance_ticks(10, 1e-3)
    split = pendulum_robot.physics_state

    other_model = load_robot_model("pendulum-swingup")
    other = SimulatedRobot(other_model, EngineHandle(compile_model(other_model), EngineId.EULER_SI))
    other.set_control_mode("pivot", ControlMode.POSITION_PD)
    other.set_joint_position_target("pivot", 0.2, PDGains(50.0, 5.0))
    for _ in range(10):
        other.advance_ticks(1, 1e-3)
    assert split == other.physics_state


def test_base_state_is_identity_and_stable(cartpole_robot):
    base = cartpole_robot.base_state()
    assert base.position == (0.0, 0.0, 0.0)
    assert base.orientation == (1.0, 0.0, 0.0, 0.0)
    assert math.isclose(sum(v * v for v in base.orientation), 1.0)
    cartpole_robot.set_joint_force("cart_joint", 5.0)
    cartpole_robot.advance_ticks(10, 1e-3)
    assert cartpole_robot.base_state() == base


def test_sensors_and_contacts_are_declared_but_unsupported(cartpole_robot):
    with pytest.raises(NotSupportedError):
        cartpole_robot.read_sensor("imu")
    with pytest.raises(NotSupportedError):
        cartpole_robot.contacts()


# --- MockRobot ----------------------------------------------------------------


def test_mock_robot_returns_scripted_values():
    mock = MockRobot(["pivot"], [{"pivot": (0.3, -0.1)}])
    assert mock.joint_position("pivot") == 0.3
    assert mock.joint_velocity("pivot") == -0.1


def test_mock_robot_advances_through_script():
    mock = MockRobot(["j"], [{"j": (0.0, 0.0)}, {"j": (1.0, 2.0)}])
    assert mock.joint_position("j") == 0.0
    mock.advance()
    assert mock.joint_position("j") == 1.0
    mock.advance()  # pinned at the last entry
    assert mock.joint_position("j") == 1.0
    mock.reset_script()
    assert mock.joint_position("j") == 0.0


def test_mock_robot_records_commands_and_checks_modes():
    mock = MockRobot(["j"], [{"j": (0.0, 0.0)}])
    mock.set_joint_force("j", 2.5)
    assert mock.commands == [("force", "j", 2.5)]
    with pytest.raises(ControlModeError):
        mock.set_joint_position_target("j", 1.0, PDGains(1.0, 0.0))
    with pytest.raises(JointNotFoundError):
        mock.set_joint_force("ghost", 1.0)
