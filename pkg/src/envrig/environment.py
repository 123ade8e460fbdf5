"""The agent-facing environment interface (Gym-style reset/step/seed/render)."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

from .errors import ValidationError
from .spaces import Space

RENDER_NONE = "none"
RENDER_TEXT = "text"
RENDER_FILE = "file"


@dataclass(frozen=True)
class EnvMetadata:
    id: str
    observation_space: Space
    action_space: Space
    agent_period: float

    def __post_init__(self):
        if self.agent_period <= 0:
            raise ValidationError(f"agent_period must be > 0, got {self.agent_period}")


class Environment(ABC):
    """One decision process: reset, step, seed, render, close.

    Instances are single-owner; callers serialize access.  Rendering never
    mutates simulation state and never affects determinism.
    """

    metadata: EnvMetadata

    @property
    def observation_space(self) -> Space:
        return self.metadata.observation_space

    @property
    def action_space(self) -> Space:
        return self.metadata.action_space

    @abstractmethod
    def seed(self, master: int) -> list[tuple[str, int]]:
        """Re-key every stochastic component from SeedTree(master).

        Returns the (label, child seed) pairs actually installed, for logging.
        """

    @abstractmethod
    def reset(self) -> list[float]:
        ...

    @abstractmethod
    def step(self, action) -> tuple[list[float], float, bool, dict]:
        ...

    @abstractmethod
    def render(self, mode: str = RENDER_NONE, path: str | None = None) -> str | None:
        ...

    @abstractmethod
    def close(self) -> None:
        ...
