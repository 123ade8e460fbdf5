"""Robot-agnostic tasks: action mapping, observations, rewards, termination.

Tasks read and actuate robots only through :class:`RobotInterface`; they never
see engines or runtimes.  All numeric constants (force limits, thresholds,
horizons, init noise, cost weights) follow the classic cart-pole/pendulum
benchmark conventions and are centralized in the parameter dataclasses below.

Angle conventions: the cart-pole dynamics measure the pole angle from upright,
the pendulum dynamics from hanging.  The pendulum swing-up task re-expresses
its joint angle as ``q + pi`` so that 0 means upright in observations and
costs, matching the cart-pole tasks.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

from .errors import ValidationError
from .robot import RobotInterface
from .seeding import Rng
from .spaces import Box, Space, require_in_space

INF = math.inf


def wrap_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    w = math.fmod(theta + math.pi, math.tau)
    if w <= 0.0:
        w += math.tau
    return w - math.pi


class Task(ABC):
    """Action processing, observation construction, reward, termination.

    ``reward_and_done`` advances the episode step counter and must be called
    exactly once per environment step, after the world advanced; the runtime
    owns that call discipline.
    """

    action_space: Space
    observation_space: Space

    def __init__(self, robot: RobotInterface):
        self.robot = robot
        self._steps = 0

    @property
    def episode_steps(self) -> int:
        return self._steps

    def reset(self):
        self._steps = 0

    @abstractmethod
    def initial_state(self, rng: Rng) -> tuple[list[float], list[float]]:
        """Draw (q, qd) from the task's initial-state distribution."""

    @abstractmethod
    def set_action(self, action) -> None:
        ...

    @abstractmethod
    def observation(self) -> list[float]:
        ...

    @abstractmethod
    def reward_and_done(self) -> tuple[float, bool]:
        ...

    @abstractmethod
    def state_text(self) -> str:
        """One-line human-readable state for TEXT rendering."""


def _scalar_action(action) -> float:
    if isinstance(action, (list, tuple)):
        return float(action[0])
    return float(action)


@dataclass(frozen=True)
class CartPoleBalanceParams:
    force_limit: float = 25.0  # N
    theta_limit: float = math.radians(12.0)  # rad
    x_limit: float = 2.4  # m
    max_steps: int = 500
    init_noise: float = 0.05
    cart_joint: str = "cart_joint"
    pole_joint: str = "pole_joint"

    def __post_init__(self):
        if min(self.force_limit, self.theta_limit, self.x_limit, self.max_steps) <= 0:
            raise ValidationError("cart-pole limits must be positive")


class CartPoleBalanceTask(Task):
    """Keep the pole upright: +1 per step until a limit trips or the horizon ends.

    Observation [x (m), xd (m/s), theta (rad from upright), thetad (rad/s)];
    action is a scalar in [-1, 1] scaled to a cart force.
    """

    def __init__(self, robot: RobotInterface, params: CartPoleBalanceParams | None = None):
        super().__init__(robot)
        self.params = params or CartPoleBalanceParams()
        p = self.params
        self.action_space = Box([-1.0], [1.0])
        self.observation_space = Box(
            [-2.0 * p.x_limit, -INF, -2.0 * p.theta_limit, -INF],
            [2.0 * p.x_limit, INF, 2.0 * p.theta_limit, INF],
        )

    def initial_state(self, rng: Rng):
        n = self.params.init_noise
        x, xd, th, thd = (rng.uniform(-n, n) + 0.0 for _ in range(4))
        return [x, th], [xd, thd]

    def set_action(self, action):
        require_in_space(self.action_space, action, "action")
        force = _scalar_action(action) * self.params.force_limit
        self.robot.set_joint_force(self.params.cart_joint, force)

    def _read(self):
        r = self.robot
        p = self.params
        return (
            r.joint_position(p.cart_joint),
            r.joint_velocity(p.cart_joint),
            r.joint_position(p.pole_joint),
            r.joint_velocity(p.pole_joint),
        )

    def observation(self):
        return list(self._read())

    def reward_and_done(self):
        x, _, th, _ = self._read()
        self._steps += 1
        p = self.params
        done = (
            abs(th) > p.theta_limit
            or abs(x) > p.x_limit
            or self._steps >= p.max_steps
        )
        return 1.0, done

    def state_text(self):
        x, xd, th, thd = self._read()
        return f"x={x:.4f} xd={xd:.4f} theta={th:.4f} thetad={thd:.4f}"


@dataclass(frozen=True)
class CartPoleSwingUpParams:
    force_limit: float = 25.0  # N
    x_limit: float = 2.4  # m
    max_steps: int = 200
    init_noise: float = 0.05
    angle_weight: float = 1.0
    velocity_weight: float = 0.1
    effort_weight: float = 0.001
    cart_joint: str = "cart_joint"
    pole_joint: str = "pole_joint"


class CartPoleSwingUpTask(Task):
    """Swing the pole from hanging to upright under a quadratic cost.

    Observation [x, xd, cos(theta), sin(theta), thetad]; fixed horizon, with an
    extra |x| > x_limit cutoff so trajectories stay on the rail.
    """

    def __init__(self, robot: RobotInterface, params: CartPoleSwingUpParams | None = None):
        super().__init__(robot)
        self.params = params or CartPoleSwingUpParams()
        p = self.params
        self.action_space = Box([-1.0], [1.0])
        self.observation_space = Box(
            [-INF, -INF, -1.0, -1.0, -INF], [INF, INF, 1.0, 1.0, INF]
        )
        self._last_force = 0.0

    def reset(self):
        super().reset()
        self._last_force = 0.0

    def initial_state(self, rng: Rng):
        n = self.params.init_noise
        x, xd, dth, thd = (rng.uniform(-n, n) + 0.0 for _ in range(4))
        return [x, math.pi + dth], [xd, thd]

    def set_action(self, action):
        require_in_space(self.action_space, action, "action")
        self._last_force = _scalar_action(action) * self.params.force_limit
        self.robot.set_joint_force(self.params.cart_joint, self._last_force)

    def observation(self):
        r = self.robot
        p = self.params
        th = r.joint_position(p.pole_joint)
        return [
            r.joint_position(p.cart_joint),
            r.joint_velocity(p.cart_joint),
            math.cos(th),
            math.sin(th) + 0.0,
            r.joint_velocity(p.pole_joint),
        ]

    def reward_and_done(self):
        r = self.robot
        p = self.params
        x = r.joint_position(p.cart_joint)
        th = r.joint_position(p.pole_joint)
        thd = r.joint_velocity(p.pole_joint)
        self._steps += 1
        cost = (
            p.angle_weight * wrap_angle(th) ** 2
            + p.velocity_weight * thd * thd
            + p.effort_weight * self._last_force * self._last_force
        )
        done = self._steps >= p.max_steps or abs(x) > p.x_limit
        return -cost, done

    def state_text(self):
        r = self.robot
        p = self.params
        return (
            f"x={r.joint_position(p.cart_joint):.4f} "
            f"xd={r.joint_velocity(p.cart_joint):.4f} "
            f"theta={r.joint_position(p.pole_joint):.4f} "
            f"thetad={r.joint_velocity(p.pole_joint):.4f}"
        )


@dataclass(frozen=True)
class PendulumSwingUpParams:
    torque_limit: float = 2.0  # N*m
    max_steps: int = 200
    init_noise: float = 0.0  # deterministic hanging start by default
    angle_weight: float = 1.0
    velocity_weight: float = 0.1
    effort_weight: float = 0.001
    joint: str = "pivot"


class PendulumSwingUpTask(Task):
    """Swing a torque-limited pendulum to upright under a quadratic cost.

    Observation [cos(theta), sin(theta), thetad] with theta measured from
    upright (the physics joint angle is measured from hanging, hence the
    pi shift).  Fixed 200-step horizon.
    """

    def __init__(self, robot: RobotInterface, params: PendulumSwingUpParams | None = None):
        super().__init__(robot)
        self.params = params or PendulumSwingUpParams()
        self.action_space = Box([-1.0], [1.0])
        self.observation_space = Box([-1.0, -1.0, -INF], [1.0, 1.0, INF])
        self._last_torque = 0.0

    def reset(self):
        super().reset()
        self._last_torque = 0.0

    def initial_state(self, rng: Rng):
        n = self.params.init_noise
        dq = rng.uniform(-n, n) + 0.0
        dqd = rng.uniform(-n, n) + 0.0
        return [dq], [dqd]

    def set_action(self, action):
        require_in_space(self.action_space, action, "action")
        self._last_torque = _scalar_action(action) * self.params.torque_limit
        self.robot.set_joint_force(self.params.joint, self._last_torque)

    def _theta_upright(self) -> float:
        return wrap_angle(self.robot.joint_position(self.params.joint) + math.pi)

    def observation(self):
        q = self.robot.joint_position(self.params.joint)
        # cos(q + pi) = -cos(q); sin(q + pi) = -sin(q). Written as subtractions
        # from 0.0 so the hanging rest state encodes exactly [-1, 0, 0].
        return [
            0.0 - math.cos(q),
            0.0 - math.sin(q),
            self.robot.joint_velocity(self.params.joint),
        ]

    def reward_and_done(self):
        p = self.params
        theta = self._theta_upright()
        thetad = self.robot.joint_velocity(p.joint)
        self._steps += 1
        cost = (
            p.angle_weight * theta * theta
            + p.velocity_weight * thetad * thetad
            + p.effort_weight * self._last_torque * self._last_torque
        )
        return -cost, self._steps >= p.max_steps

    def state_text(self):
        return (
            f"theta={self._theta_upright():.4f} "
            f"thetad={self.robot.joint_velocity(self.params.joint):.4f}"
        )


TASK_IDS = ("cartpole-balance", "cartpole-swingup", "pendulum-swingup")


def make_task(task_id: str, robot: RobotInterface, init_noise: float | None = None) -> Task:
    """Task registry: id -> constructed task bound to the given robot."""
    if task_id == "cartpole-balance":
        params = CartPoleBalanceParams()
        if init_noise is not None:
            params = CartPoleBalanceParams(init_noise=init_noise)
        return CartPoleBalanceTask(robot, params)
    if task_id == "cartpole-swingup":
        params = CartPoleSwingUpParams()
        if init_noise is not None:
            params = CartPoleSwingUpParams(init_noise=init_noise)
        return CartPoleSwingUpTask(robot, params)
    if task_id == "pendulum-swingup":
        params = PendulumSwingUpParams()
        if init_noise is not None:
            params = PendulumSwingUpParams(init_noise=init_noise)
        return PendulumSwingUpTask(robot, params)
    raise ValidationError(f"unknown task id {task_id!r}; known: {', '.join(TASK_IDS)}")
