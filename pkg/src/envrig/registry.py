"""Environment registry: string ids to ready-to-step runtimes."""

from __future__ import annotations

from importlib import resources

from .dynamics import compile_model
from .engines import EngineHandle, EngineId
from .errors import EnvrigError, UnknownEnvError
from .model import RobotModel, parse_sdf
from .robot import SimulatedRobot
from .runtime import (
    ClockSource,
    RealTimeRuntime,
    RuntimeConfig,
    SimulatedRuntime,
    VectorEnv,
    simulated_world_clock,
)
from .tasks import make_task

_ENV_MODELS = {
    "cartpole-balance": "cartpole.sdf",
    "cartpole-swingup": "cartpole.sdf",
    "pendulum-swingup": "pendulum.sdf",
}

ENV_IDS = tuple(_ENV_MODELS)


def registered_ids() -> list[str]:
    return list(ENV_IDS)


def load_robot_model(env_id: str) -> RobotModel:
    if env_id not in _ENV_MODELS:
        raise UnknownEnvError(env_id, registered_ids())
    text = (
        resources.files("envrig").joinpath("models", _ENV_MODELS[env_id]).read_text()
    )
    robot_model, diagnostics = parse_sdf(text)
    if robot_model is None:
        raise EnvrigError(
            f"shipped model for {env_id} failed to load: "
            + "; ".join(str(d) for d in diagnostics)
        )
    return robot_model


def _resolve_config(
    engine: EngineId | str | None,
    seed: int | None,
    physics_dt: float | None,
    agent_period: float | None,
    rtf: float | None,
) -> RuntimeConfig:
    if isinstance(engine, str):
        engine = EngineId(engine)
    defaults = RuntimeConfig()
    return RuntimeConfig(
        physics_dt=defaults.physics_dt if physics_dt is None else physics_dt,
        agent_period=defaults.agent_period if agent_period is None else agent_period,
        rtf=defaults.rtf if rtf is None else rtf,
        engine=defaults.engine if engine is None else engine,
        seed=defaults.seed if seed is None else seed,
    )


def _build_world(env_id: str, config: RuntimeConfig):
    robot_model = load_robot_model(env_id)
    handle = EngineHandle(compile_model(robot_model), config.engine)
    return SimulatedRobot(robot_model, handle)


def make_env(
    env_id: str,
    *,
    engine: EngineId | str | None = None,
    seed: int | None = None,
    physics_dt: float | None = None,
    agent_period: float | None = None,
    rtf: float | None = None,
    init_noise: float | None = None,
) -> SimulatedRuntime:
    """Construct a simulated environment for a registered id."""
    config = _resolve_config(engine, seed, physics_dt, agent_period, rtf)
    robot = _build_world(env_id, config)
    task = make_task(env_id, robot, init_noise=init_noise)
    return SimulatedRuntime(env_id, robot, task, config)


def make_realtime_env(
    env_id: str,
    *,
    clock: ClockSource | None = None,
    engine: EngineId | str | None = None,
    seed: int | None = None,
    physics_dt: float | None = None,
    agent_period: float | None = None,
    init_noise: float | None = None,
) -> RealTimeRuntime:
    """A real-time runtime hosting the simulated robot behind a world clock.

    With the default clock (a MockClock that advances the simulated world),
    trajectories are bit-identical to make_env's for the same seed and
    actions.  Pass a MonotonicClock to pace against wall time instead.
    """
    config = _resolve_config(engine, seed, physics_dt, agent_period, rtf=0.0)
    robot = _build_world(env_id, config)
    task = make_task(env_id, robot, init_noise=init_noise)
    if clock is None:
        clock = simulated_world_clock(robot, config.physics_dt)

    def reset_hook(q, qd):
        from .engines import PhysicsState

        robot.set_physics_state(PhysicsState(tuple(q), tuple(qd), ticks=0))
        robot.clear_references()

    return RealTimeRuntime(env_id, robot, task, config, clock, reset_hook=reset_hook)


def make_vector_env(
    env_id: str,
    n: int,
    *,
    seed: int = 0,
    num_workers: int | None = None,
    engine: EngineId | str | None = None,
    physics_dt: float | None = None,
    agent_period: float | None = None,
    init_noise: float | None = None,
) -> VectorEnv:
    """n independent instances of env_id with per-instance derived seeds."""

    def factory(child_seed: int) -> SimulatedRuntime:
        return make_env(
            env_id,
            engine=engine,
            seed=child_seed,
            physics_dt=physics_dt,
            agent_period=agent_period,
            init_noise=init_noise,
        )

    return VectorEnv(n, seed, factory, num_workers=num_workers)
