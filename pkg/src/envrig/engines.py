"""Pluggable fixed-step integrators over a DynamicsModel.

Both engines advance the same state type from the same inputs, so an
environment can swap them per episode.  ``engine_step`` is a pure function:
output depends only on (engine, dynamics, state, force, dt) and the input
state is never mutated, which is what makes stepping replayable from a stored
PhysicsState.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .dynamics import DynamicsModel
from .errors import DivergenceError, ValidationError


class EngineId(Enum):
    EULER_SI = "euler-si"
    RK4 = "rk4"


@dataclass(frozen=True)
class PhysicsState:
    """Generalized positions/velocities plus the integer tick count.

    Simulated time is ticks * dt by construction, never an accumulated float,
    so k steps land on exactly k * agent_period.
    """

    q: tuple[float, ...]
    qd: tuple[float, ...]
    ticks: int = 0

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        object.__setattr__(self, "qd", tuple(float(v) for v in self.qd))
        if len(self.q) != len(self.qd):
            raise ValidationError(
                f"q and qd must have equal length, got {len(self.q)} and {len(self.qd)}"
            )

    def time(self, dt: float) -> float:
        return self.ticks * dt

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.q + self.qd)


def _check_inputs(dyn: DynamicsModel, state: PhysicsState, force, dt: float):
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if len(state.q) != dyn.dof:
        raise ValidationError(
            f"state dimension {len(state.q)} does not match model dof {dyn.dof}"
        )
    if len(force) != dyn.dof:
        raise ValidationError(
            f"force dimension {len(force)} does not match model dof {dyn.dof}"
        )
    if not state.is_finite():
        raise ValidationError("state contains non-finite values")


def _euler_si(dyn, q, qd, force, dt):
    qdd = dyn.forward_dynamics(q, qd, force)
    qd_next = tuple(v + dt * a for v, a in zip(qd, qdd))
    q_next = tuple(x + dt * v for x, v in zip(q, qd_next))
    return q_next, qd_next


def _rk4(dyn, q, qd, force, dt):
    # Classic 4-stage update on (q, qd); force is held constant across stages.
    half = 0.5 * dt
    k1q = qd
    k1v = dyn.forward_dynamics(q, qd, force)

    q2 = tuple(x + half * v for x, v in zip(q, k1q))
    v2 = tuple(v + half * a for v, a in zip(qd, k1v))
    k2q = v2
    k2v = dyn.forward_dynamics(q2, v2, force)

    q3 = tuple(x + half * v for x, v in zip(q, k2q))
    v3 = tuple(v + half * a for v, a in zip(qd, k2v))
    k3q = v3
    k3v = dyn.forward_dynamics(q3, v3, force)

    q4 = tuple(x + dt * v for x, v in zip(q, k3q))
    v4 = tuple(v + dt * a for v, a in zip(qd, k3v))
    k4q = v4
    k4v = dyn.forward_dynamics(q4, v4, force)

    sixth = dt / 6.0
    q_next = tuple(
        x + sixth * (a + 2.0 * (b + c) + d)
        for x, a, b, c, d in zip(q, k1q, k2q, k3q, k4q)
    )
    qd_next = tuple(
        v + sixth * (a + 2.0 * (b + c) + d)
        for v, a, b, c, d in zip(qd, k1v, k2v, k3v, k4v)
    )
    return q_next, qd_next


def _fast_state(q: tuple, qd: tuple, ticks: int) -> PhysicsState:
    # Internal constructor for engine-produced float tuples; skips the
    # normalizing scans of the public dataclass constructor.
    state = object.__new__(PhysicsState)
    object.__setattr__(state, "q", q)
    object.__setattr__(state, "qd", qd)
    object.__setattr__(state, "ticks", ticks)
    return state


def _advance(engine, dyn, state, force, dt) -> PhysicsState:
    """The shared arithmetic path; input validity is the caller's contract."""
    if engine is EngineId.EULER_SI:
        q_next, qd_next = _euler_si(dyn, state.q, state.qd, force, dt)
    elif engine is EngineId.RK4:
        q_next, qd_next = _rk4(dyn, state.q, state.qd, force, dt)
    else:
        raise ValidationError(f"unknown engine {engine!r}")
    if all(map(math.isfinite, q_next)) and all(map(math.isfinite, qd_next)):
        return _fast_state(q_next, qd_next, state.ticks + 1)
    raise DivergenceError(
        f"integration diverged at tick {state.ticks + 1}",
        state=PhysicsState(q_next, qd_next, state.ticks + 1),
    )


def engine_step(
    engine: EngineId,
    dyn: DynamicsModel,
    state: PhysicsState,
    force: tuple[float, ...],
    dt: float,
) -> PhysicsState:
    """One integration tick. Raises DivergenceError on a non-finite result."""
    _check_inputs(dyn, state, force, dt)
    return _advance(engine, dyn, state, force, dt)


class EngineHandle:
    """A stateful engine instance: one dynamics model, one engine, one state.

    The handle is the unit of replay: set_state followed by identical step
    calls reproduces identical states bit-for-bit.
    """

    def __init__(self, dyn: DynamicsModel, engine: EngineId, state: PhysicsState | None = None):
        self.dyn = dyn
        self.engine = engine
        self._state = state if state is not None else PhysicsState(
            (0.0,) * dyn.dof, (0.0,) * dyn.dof
        )
        self._validate_dims(self._state)

    def _validate_dims(self, state: PhysicsState):
        if len(state.q) != self.dyn.dof:
            raise ValidationError(
                f"state dimension {len(state.q)} does not match model dof {self.dyn.dof}"
            )
        if not state.is_finite():
            raise ValidationError("state contains non-finite values")

    @property
    def state(self) -> PhysicsState:
        return self._state

    def set_state(self, state: PhysicsState):
        self._validate_dims(state)
        self._state = state

    def step(self, force: tuple[float, ...], dt: float) -> PhysicsState:
        # The handle's state is valid by construction (set_state validates and
        # every produced state is divergence-checked), so only the per-call
        # inputs need checking before taking the shared arithmetic path.
        if dt <= 0:
            raise ValidationError(f"dt must be positive, got {dt}")
        if len(force) != self.dyn.dof:
            raise ValidationError(
                f"force dimension {len(force)} does not match model dof {self.dyn.dof}"
            )
        self._state = _advance(self.engine, self.dyn, self._state, force, dt)
        return self._state
