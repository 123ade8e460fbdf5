"""envrig: reproducible robot reinforcement-learning environments.

Environments wrap a robot-agnostic Task in a Runtime (simulated or real-time)
behind a Gym-style reset/step/seed/render interface, with deterministic
seeding, interchangeable fixed-step physics engines, Real-Time-Factor pacing,
and parallel vectorized instances.
"""

from .dynamics import CartPoleDynamics, DynamicsModel, PendulumDynamics, compile_model
from .engines import EngineHandle, EngineId, PhysicsState, engine_step
from .environment import EnvMetadata, Environment
from .errors import (
    ClockRegressionError,
    ConfigError,
    ControlModeError,
    DivergenceError,
    DumpFormatError,
    EnvClosedError,
    EnvrigError,
    JointNotFoundError,
    NotSupportedError,
    ResetRequiredError,
    UnknownEnvError,
    UnsupportedArchetypeError,
    ValidationError,
)
from .model import (
    Diagnostic,
    Joint,
    JointKind,
    Link,
    RobotModel,
    parse_sdf,
    serialize_sdf,
    validate,
)
from .records import DumpHeader, StepRecord, parse_dump, serialize_header, serialize_record
from .registry import (
    ENV_IDS,
    load_robot_model,
    make_env,
    make_realtime_env,
    make_vector_env,
    registered_ids,
)
from .robot import BaseState, ControlMode, MockRobot, PDGains, RobotInterface, SimulatedRobot
from .runtime import (
    ClockSource,
    MockClock,
    MonotonicClock,
    RealTimeRuntime,
    RuntimeConfig,
    SimulatedRuntime,
    VectorEnv,
    simulated_world_clock,
)
from .seeding import Rng, SeedTree, derive_child_seed
from .spaces import Box, Discrete, Space
from .tasks import (
    CartPoleBalanceParams,
    CartPoleBalanceTask,
    CartPoleSwingUpParams,
    CartPoleSwingUpTask,
    PendulumSwingUpParams,
    PendulumSwingUpTask,
    Task,
    make_task,
    wrap_angle,
)

__version__ = "0.1.0"
