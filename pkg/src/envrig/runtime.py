"""Runtimes: they wrap a Task and expose the Environment interface.

* :class:`SimulatedRuntime` advances an in-process physics world and, when a
  Real-Time Factor is set, paces each step so simulated time over wall time
  approaches the requested ratio.
* :class:`RealTimeRuntime` runs the identical Task against any robot, pacing
  itself with a :class:`ClockSource` instead of advancing a world; with a
  mock clock driving a simulated robot it reproduces the simulated runtime's
  trajectories bit-for-bit, which is the sim-to-real architecture claim made
  testable.
* :class:`VectorEnv` runs n independent instances on a worker pool with
  deterministic, index-ordered results.
"""

from __future__ import annotations

import math
import os
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .engines import EngineId, PhysicsState
from .environment import (
    EnvMetadata,
    Environment,
    RENDER_FILE,
    RENDER_NONE,
    RENDER_TEXT,
)
from .errors import (
    ClockRegressionError,
    ConfigError,
    DivergenceError,
    EnvClosedError,
    ResetRequiredError,
    ValidationError,
)
from .records import StepRecord, serialize_record
from .robot import SimulatedRobot
from .seeding import Rng, SeedTree
from .spaces import require_in_space
from .tasks import Task

# Test hook: when this variable is set, reset() adds unseeded noise so the
# determinism checker's negative control has something to catch.
FAULT_ENV_VAR = "ENVRIG_INJECT_NONDETERMINISM"


@dataclass(frozen=True)
class RuntimeConfig:
    """Stepping geometry, pacing, engine and seed for one environment."""

    physics_dt: float = 1e-3
    agent_period: float = 0.01
    rtf: float = 0.0  # 0 means unbounded (as fast as possible)
    engine: EngineId = EngineId.EULER_SI
    seed: int = 0
    ticks_per_step: int = field(init=False)

    def __post_init__(self):
        if self.physics_dt <= 0:
            raise ConfigError(f"physics_dt must be > 0, got {self.physics_dt}")
        if self.agent_period <= 0:
            raise ConfigError(f"agent_period must be > 0, got {self.agent_period}")
        if self.rtf < 0:
            raise ConfigError(f"rtf must be >= 0, got {self.rtf}")
        ratio = self.agent_period / self.physics_dt
        ticks = round(ratio)
        if ticks < 1 or abs(ratio - ticks) > 1e-9 * max(1.0, ratio):
            raise ConfigError(
                f"agent_period {self.agent_period} is not an integer multiple of "
                f"physics_dt {self.physics_dt}"
            )
        object.__setattr__(self, "ticks_per_step", ticks)


# --- clock sources ----------------------------------------------------------


class ClockSource(ABC):
    """Monotonic time for real-time pacing."""

    @abstractmethod
    def now(self) -> float:
        ...

    @abstractmethod
    def sleep_until(self, t: float) -> None:
        ...


class MonotonicClock(ClockSource):
    def now(self) -> float:
        return time.monotonic()

    def sleep_until(self, t: float) -> None:
        remaining = t - time.monotonic()
        if remaining > 0:
            time.sleep(remaining)


class MockClock(ClockSource):
    """Controllable clock for tests and for hosting simulated robots.

    ``sleep_until`` normally lands exactly on the requested deadline.  Tests
    can queue ``extra_jumps`` (seconds added to a sleep target, to fake
    overruns) or ``overrides`` (absolute times, possibly in the past, to fake
    broken clocks).  ``on_advance(old, new)`` fires whenever time moves
    forward; wiring it to a simulated robot makes the world progress with the
    clock, the way a real robot's world progresses with wall time.
    """

    def __init__(self, start: float = 0.0, on_advance: Callable[[float, float], None] | None = None):
        self._now = float(start)
        self._on_advance = on_advance
        self.extra_jumps: list[float] = []
        self.overrides: list[float | None] = []

    def now(self) -> float:
        return self._now

    def sleep_until(self, t: float) -> None:
        target = t
        if self.overrides:
            override = self.overrides.pop(0)
            if override is not None:
                target = override
        if self.extra_jumps:
            target += self.extra_jumps.pop(0)
        old = self._now
        self._now = target
        if self._on_advance is not None and target > old:
            self._on_advance(old, target)


def simulated_world_clock(
    robot: SimulatedRobot, physics_dt: float, start: float = 0.0
) -> MockClock:
    """A MockClock whose passage of time steps the given simulated robot."""

    def advance(old: float, new: float):
        ticks = round((new - old) / physics_dt)
        if ticks > 0:
            robot.advance_ticks(ticks, physics_dt)

    return MockClock(start, on_advance=advance)


# --- shared episode machinery ------------------------------------------------


class _EpisodeRuntime(Environment):
    """Reset/step bookkeeping shared by the simulated and real-time runtimes."""

    def __init__(self, env_id: str, task: Task, config: RuntimeConfig):
        self._task = task
        self._config = config
        self.metadata = EnvMetadata(
            id=env_id,
            observation_space=task.observation_space,
            action_space=task.action_space,
            agent_period=config.agent_period,
        )
        self._closed = False
        self._needs_reset = True
        self._done = False
        self._episode_steps = 0
        self._last_action: tuple[float, ...] = ()
        self._last_reward = 0.0
        self._streams: dict[str, Rng] = {}
        self._seed_tree = SeedTree(config.seed)
        self._install_streams(config.seed)

    # -- seeding --------------------------------------------------------------

    def _install_streams(self, master: int) -> list[tuple[str, int]]:
        self._seed_tree = SeedTree(master)
        installed = [("init", self._seed_tree.child("init"))]
        self._streams = {label: Rng(child) for label, child in installed}
        return installed

    def seed(self, master: int) -> list[tuple[str, int]]:
        self._check_open()
        return self._install_streams(master)

    @property
    def seed_tree(self) -> SeedTree:
        return self._seed_tree

    # -- properties -----------------------------------------------------------

    @property
    def task(self) -> Task:
        return self._task

    @property
    def config(self) -> RuntimeConfig:
        return self._config

    @property
    def done(self) -> bool:
        return self._done

    @property
    def episode_steps(self) -> int:
        return self._episode_steps

    @property
    def sim_time(self) -> float:
        """Simulated seconds since the episode started: steps * agent_period."""
        return self._episode_steps * self._config.agent_period

    # -- lifecycle ------------------------------------------------------------

    def _check_open(self):
        if self._closed:
            raise EnvClosedError("environment is closed")

    def reset(self) -> list[float]:
        self._check_open()
        q, qd = self._task.initial_state(self._streams["init"])
        if os.environ.get(FAULT_ENV_VAR):
            q = list(q)
            q[0] += int.from_bytes(os.urandom(4), "little") * 1e-12
        self._apply_initial_state(q, qd)
        self._task.reset()
        self._needs_reset = False
        self._done = False
        self._episode_steps = 0
        self._last_action = ()
        self._last_reward = 0.0
        return self._task.observation()

    def step(self, action) -> tuple[list[float], float, bool, dict]:
        self._check_open()
        if self._needs_reset:
            raise ResetRequiredError("call reset() before stepping")
        if self._done:
            raise ResetRequiredError("episode is done; call reset() to start a new one")
        require_in_space(self.action_space, action, "action")
        self._task.set_action(action)
        info: dict = {}
        try:
            self._advance_world(info)
        except DivergenceError:
            self._done = True
            raise
        self._episode_steps += 1
        obs = self._task.observation()
        reward, done = self._task.reward_and_done()
        self._done = done
        self._last_action = tuple(
            float(v) for v in (action if isinstance(action, (list, tuple)) else (action,))
        )
        self._last_reward = reward
        return obs, reward, done, info

    @abstractmethod
    def _apply_initial_state(self, q: Sequence[float], qd: Sequence[float]):
        ...

    @abstractmethod
    def _advance_world(self, info: dict):
        ...

    # -- rendering ------------------------------------------------------------

    def render(self, mode: str = RENDER_NONE, path: str | None = None) -> str | None:
        self._check_open()
        if mode == RENDER_NONE:
            return None
        if mode == RENDER_TEXT:
            return self._task.state_text()
        if mode == RENDER_FILE:
            if not path:
                raise ValidationError("file rendering requires a path")
            record = StepRecord(
                t=self.sim_time,
                obs=tuple(self._task.observation()),
                act=self._last_action,
                rew=self._last_reward,
                done=self._done,
            )
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(serialize_record(record) + "\n")
            return None
        raise ValidationError(f"unknown render mode {mode!r}")

    def close(self) -> None:
        self._closed = True


# --- simulated runtime --------------------------------------------------------


class SimulatedRuntime(_EpisodeRuntime):
    """In-process simulation with Real-Time-Factor pacing.

    Each step advances the engine exactly agent_period/physics_dt ticks, then,
    when rtf > 0, blocks until the call's wall duration reaches
    agent_period / rtf.  Pacing happens after the results are computed and
    never alters them.
    """

    def __init__(self, env_id: str, robot: SimulatedRobot, task: Task, config: RuntimeConfig):
        super().__init__(env_id, task, config)
        self._robot = robot

    @property
    def robot(self) -> SimulatedRobot:
        return self._robot

    def switch_engine(self, engine: EngineId):
        """Engine changes are only honored between episodes."""
        if not (self._needs_reset or self._done):
            raise ValidationError("engine switching is only allowed at reset")
        self._robot.handle.engine = engine

    def _apply_initial_state(self, q, qd):
        self._robot.set_physics_state(PhysicsState(tuple(q), tuple(qd), ticks=0))
        self._robot.clear_references()

    def _advance_world(self, info: dict):
        self._robot.advance_ticks(self._config.ticks_per_step, self._config.physics_dt)
        clamped = self._robot.take_clamped()
        if clamped:
            info["clamped"] = clamped

    def step(self, action):
        if self._config.rtf > 0:
            start = time.monotonic()
            result = super().step(action)
            deadline = start + self._config.agent_period / self._config.rtf
            remaining = deadline - time.monotonic()
            if remaining > 0:
                time.sleep(remaining)
            return result
        return super().step(action)


# --- real-time runtime ----------------------------------------------------------


class RealTimeRuntime(_EpisodeRuntime):
    """Runs the same Task object against a clock instead of stepping a world.

    step() latches the action on the robot, sleeps until the next agent-period
    boundary of the attached ClockSource, then reads the outcome.  Boundary
    overruns are counted and reported in step info, never silently dropped.
    Episode reset in the real world is delegated to the reset_hook; the
    framework only defines the hook.
    """

    def __init__(
        self,
        env_id: str,
        robot,
        task: Task,
        config: RuntimeConfig,
        clock: ClockSource,
        reset_hook: Callable[[Sequence[float], Sequence[float]], None] | None = None,
    ):
        super().__init__(env_id, task, config)
        self._robot = robot
        self._clock = clock
        self._reset_hook = reset_hook
        self._anchor = 0.0
        self._boundary = 0
        self._last_clock = -math.inf
        self.overrun_count = 0

    @property
    def robot(self):
        return self._robot

    def _apply_initial_state(self, q, qd):
        if self._reset_hook is not None:
            self._reset_hook(q, qd)
        self._anchor = self._clock.now()
        self._boundary = 0
        self._last_clock = self._anchor
        self.overrun_count = 0

    def _advance_world(self, info: dict):
        self._boundary += 1
        target = self._anchor + self._boundary * self._config.agent_period
        self._clock.sleep_until(target)
        now = self._clock.now()
        if now < self._last_clock:
            raise ClockRegressionError(
                f"clock went backwards: {now} < {self._last_clock}"
            )
        self._last_clock = now
        missed = int(max(0.0, (now - target) / self._config.agent_period + 1e-9))
        if missed:
            self.overrun_count += missed
            self._boundary += missed
        info["overruns"] = missed
        info["overruns_total"] = self.overrun_count


# --- vector environment --------------------------------------------------------


class VectorEnv:
    """n independent instances stepped on a fixed worker pool.

    Instance i is seeded with SeedTree(master).child("env-i") and behaves
    exactly like a standalone environment fed the same actions, regardless of
    worker scheduling: workers own one instance per call, nothing is shared,
    and results are gathered in index order.  A done instance reports its
    terminal observation, then is reset on the next step (the reset
    observation is returned with reward 0.0 and done False).  A diverged
    instance is flagged done and reset next step; the others are unaffected.
    """

    def __init__(
        self,
        n: int,
        seed: int,
        env_factory: Callable[[int], Environment],
        num_workers: int | None = None,
    ):
        if n < 1:
            raise ValidationError(f"vector env needs n >= 1, got {n}")
        self.n = n
        tree = SeedTree(seed)
        self.child_seeds = [tree.child(f"env-{i}") for i in range(n)]
        if len(set(self.child_seeds)) != n:
            raise ValidationError("per-instance child seeds are not pairwise distinct")
        self.envs = [env_factory(child) for child in self.child_seeds]
        workers = num_workers or min(n, os.cpu_count() or 1)
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._needs_reset = [True] * n
        self._last_done = [False] * n
        self._last_obs: list[list[float] | None] = [None] * n
        self._closed = False

    def _gather(self, jobs):
        futures = [self._pool.submit(job) for job in jobs]
        return [f.result() for f in futures]

    def reset(self) -> list[list[float]]:
        self._check_open()
        observations = self._gather([env.reset for env in self.envs])
        self._needs_reset = [False] * self.n
        self._last_done = [False] * self.n
        self._last_obs = list(observations)
        return observations

    def seed(self, master: int) -> list[int]:
        self._check_open()
        tree = SeedTree(master)
        self.child_seeds = [tree.child(f"env-{i}") for i in range(self.n)]
        for env, child in zip(self.envs, self.child_seeds):
            env.seed(child)
        self._needs_reset = [True] * self.n
        return list(self.child_seeds)

    def step(self, actions: Sequence) -> list[tuple[list[float], float, bool, dict]]:
        self._check_open()
        if any(self._needs_reset):
            raise ResetRequiredError("call reset() before stepping the vector env")
        if len(actions) != self.n:
            raise ValidationError(
                f"expected {self.n} actions, got {len(actions)}"
            )

        def job_for(i: int, action):
            def run():
                env = self.envs[i]
                if self._last_done[i]:
                    obs = env.reset()
                    return obs, 0.0, False, {"reset": True}
                try:
                    return env.step(action)
                except DivergenceError as exc:
                    return self._last_obs[i], 0.0, True, {"error": str(exc)}

            return run

        results = self._gather([job_for(i, a) for i, a in enumerate(actions)])
        for i, (obs, _, done, _) in enumerate(results):
            self._last_done[i] = done
            self._last_obs[i] = obs
        return results

    def _check_open(self):
        if self._closed:
            raise EnvClosedError("vector environment is closed")

    def close(self):
        if not self._closed:
            self._closed = True
            self._pool.shutdown(wait=True)
            for env in self.envs:
                env.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
