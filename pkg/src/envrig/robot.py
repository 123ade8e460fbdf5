"""Robot abstraction: joint reads, actuation references, base pose.

Tasks talk to robots exclusively through :class:`RobotInterface`, which is
what lets one task run unchanged against the physics-backed
:class:`SimulatedRobot`, the scripted :class:`MockRobot`, or a future hardware
driver.  References are latched: setting one twice before the world advances
applies only the last value, and a latched reference is held as a zero-order
hold across every physics tick until replaced.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .engines import EngineHandle, PhysicsState
from .errors import (
    ControlModeError,
    JointNotFoundError,
    NotSupportedError,
    ValidationError,
)
from .model import RobotModel, strip_fixed_joints


class ControlMode(Enum):
    FORCE = "force"
    POSITION_PD = "position_pd"


@dataclass(frozen=True)
class PDGains:
    kp: float
    kd: float

    def __post_init__(self):
        if self.kp < 0 or self.kd < 0:
            raise ValidationError(f"PD gains must be non-negative, got {self}")


@dataclass(frozen=True)
class BaseState:
    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float]  # unit quaternion, w first

    def __post_init__(self):
        norm = math.sqrt(sum(v * v for v in self.orientation))
        if abs(norm - 1.0) > 1e-9:
            raise ValidationError(f"quaternion norm {norm} is not 1")


IDENTITY_BASE = BaseState((0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0))


class RobotInterface(ABC):
    """Reading joint state and setting actuation references."""

    @abstractmethod
    def joint_names(self) -> tuple[str, ...]:
        """Actuated joint names; order is fixed for the robot's lifetime."""

    @abstractmethod
    def joint_position(self, name: str) -> float:
        ...

    @abstractmethod
    def joint_velocity(self, name: str) -> float:
        ...

    @abstractmethod
    def control_mode(self, name: str) -> ControlMode:
        ...

    @abstractmethod
    def set_control_mode(self, name: str, mode: ControlMode) -> None:
        """Switch a joint's mode; clears any latched reference for it."""

    @abstractmethod
    def set_joint_force(self, name: str, value: float) -> None:
        """Latch a generalized force reference (requires FORCE mode)."""

    @abstractmethod
    def set_joint_position_target(self, name: str, value: float, gains: PDGains) -> None:
        """Latch a PD position reference (requires POSITION_PD mode)."""

    @abstractmethod
    def base_state(self) -> BaseState:
        ...

    # Declared per the robot API surface, intentionally unimplemented:
    # sensor and contact data acquisition are not supported yet.
    def read_sensor(self, name: str):
        raise NotSupportedError("sensor data is not supported")

    def contacts(self):
        raise NotSupportedError("contact data is not supported")


class SimulatedRobot(RobotInterface):
    """Physics-backed robot over an EngineHandle.

    Owns the reference store and resolves it to per-joint generalized forces
    each tick: FORCE references are held as-is, POSITION_PD computes
    kp*(target - q) - kd*qd at the physics rate.  Applied forces are clamped
    to the model's effort limits; clamped joint names are collected so the
    runtime can report them in step info.
    """

    def __init__(self, robot_model: RobotModel, handle: EngineHandle):
        self._model = robot_model
        self._handle = handle
        moving = strip_fixed_joints(robot_model)
        self._names = tuple(j.name for j in moving)
        if tuple(handle.dyn.joint_names) != self._names:
            raise ValidationError(
                f"engine joints {handle.dyn.joint_names} do not match model joints "
                f"{self._names}"
            )
        self._index = {name: i for i, name in enumerate(self._names)}
        self._effort = tuple(j.effort_limit for j in moving)
        self._modes = {name: ControlMode.FORCE for name in self._names}
        self._force_refs: dict[str, float] = {}
        self._pd_refs: dict[str, tuple[float, PDGains]] = {}
        self._clamped: set[str] = set()

    # -- RobotInterface -----------------------------------------------------

    def joint_names(self) -> tuple[str, ...]:
        return self._names

    def _idx(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise JointNotFoundError(name, self._names) from None

    def joint_position(self, name: str) -> float:
        return self._handle.state.q[self._idx(name)]

    def joint_velocity(self, name: str) -> float:
        return self._handle.state.qd[self._idx(name)]

    def control_mode(self, name: str) -> ControlMode:
        self._idx(name)
        return self._modes[name]

    def set_control_mode(self, name: str, mode: ControlMode) -> None:
        self._idx(name)
        self._modes[name] = mode
        self._force_refs.pop(name, None)
        self._pd_refs.pop(name, None)

    def set_joint_force(self, name: str, value: float) -> None:
        self._idx(name)
        if self._modes[name] is not ControlMode.FORCE:
            raise ControlModeError(
                f"joint {name!r} is in {self._modes[name].value} mode, not force mode"
            )
        self._force_refs[name] = float(value)

    def set_joint_position_target(self, name: str, value: float, gains: PDGains) -> None:
        self._idx(name)
        if self._modes[name] is not ControlMode.POSITION_PD:
            raise ControlModeError(
                f"joint {name!r} is in {self._modes[name].value} mode, not position mode"
            )
        self._pd_refs[name] = (float(value), gains)

    def base_state(self) -> BaseState:
        # The supported archetypes are all fixed-base.
        return IDENTITY_BASE

    # -- simulation-side surface (not part of RobotInterface) ----------------

    @property
    def handle(self) -> EngineHandle:
        return self._handle

    @property
    def physics_state(self) -> PhysicsState:
        return self._handle.state

    def set_physics_state(self, state: PhysicsState):
        self._handle.set_state(state)

    def clear_references(self):
        self._force_refs.clear()
        self._pd_refs.clear()

    def take_clamped(self) -> list[str]:
        """Joint names clamped since the last call, in joint order."""
        clamped = sorted(self._clamped, key=self._index.__getitem__)
        self._clamped.clear()
        return clamped

    def _tick_forces(self, state: PhysicsState) -> tuple[float, ...]:
        forces = []
        for i, name in enumerate(self._names):
            if self._modes[name] is ControlMode.FORCE:
                value = self._force_refs.get(name, 0.0)
            else:
                ref = self._pd_refs.get(name)
                if ref is None:
                    value = 0.0
                else:
                    target, gains = ref
                    value = gains.kp * (target - state.q[i]) - gains.kd * state.qd[i]
            limit = self._effort[i]
            if value > limit:
                value = limit
                self._clamped.add(name)
            elif value < -limit:
                value = -limit
                self._clamped.add(name)
            forces.append(value)
        return tuple(forces)

    def advance_ticks(self, n: int, dt: float):
        """Advance the backing world n physics ticks, applying latched references."""
        handle = self._handle
        for _ in range(n):
            handle.step(self._tick_forces(handle.state), dt)


class MockRobot(RobotInterface):
    """Scripted robot for robot-agnosticism tests.

    The script is a sequence of per-joint (position, velocity) snapshots; each
    advance() moves the cursor.  Actuation calls are recorded but have no
    effect on the script.
    """

    def __init__(
        self,
        names: Sequence[str],
        script: Sequence[dict[str, tuple[float, float]]],
    ):
        self._names = tuple(names)
        if not script:
            raise ValidationError("mock robot script must not be empty")
        self._script = list(script)
        self._cursor = 0
        self._modes = {name: ControlMode.FORCE for name in self._names}
        self.commands: list[tuple[str, str, float]] = []

    def joint_names(self) -> tuple[str, ...]:
        return self._names

    def _entry(self, name: str) -> tuple[float, float]:
        if name not in self._names:
            raise JointNotFoundError(name, self._names)
        return self._script[self._cursor].get(name, (0.0, 0.0))

    def joint_position(self, name: str) -> float:
        return self._entry(name)[0]

    def joint_velocity(self, name: str) -> float:
        return self._entry(name)[1]

    def control_mode(self, name: str) -> ControlMode:
        if name not in self._names:
            raise JointNotFoundError(name, self._names)
        return self._modes[name]

    def set_control_mode(self, name: str, mode: ControlMode) -> None:
        if name not in self._names:
            raise JointNotFoundError(name, self._names)
        self._modes[name] = mode

    def set_joint_force(self, name: str, value: float) -> None:
        if name not in self._names:
            raise JointNotFoundError(name, self._names)
        if self._modes[name] is not ControlMode.FORCE:
            raise ControlModeError(f"joint {name!r} is not in force mode")
        self.commands.append(("force", name, float(value)))

    def set_joint_position_target(self, name: str, value: float, gains: PDGains) -> None:
        if name not in self._names:
            raise JointNotFoundError(name, self._names)
        if self._modes[name] is not ControlMode.POSITION_PD:
            raise ControlModeError(f"joint {name!r} is not in position mode")
        self.commands.append(("position", name, float(value)))

    def base_state(self) -> BaseState:
        return IDENTITY_BASE

    def advance(self):
        if self._cursor < len(self._script) - 1:
            self._cursor += 1

    def reset_script(self):
        self._cursor = 0
