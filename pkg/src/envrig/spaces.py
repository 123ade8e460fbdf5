"""Action/observation space descriptors: bounded boxes and discrete sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import ValidationError
from .seeding import Rng


@dataclass(frozen=True)
class Box:
    """Axis-aligned box of reals. Bounds may be +-inf; sampling needs finite ones.

    Physical units per dimension are documented by the task that owns the space.
    """

    low: tuple[float, ...]
    high: tuple[float, ...]

    def __init__(self, low: Sequence[float], high: Sequence[float]):
        low_t = tuple(float(v) for v in low)
        high_t = tuple(float(v) for v in high)
        if len(low_t) != len(high_t):
            raise ValidationError(
                f"box bounds must have equal length, got {len(low_t)} and {len(high_t)}"
            )
        for i, (lo, hi) in enumerate(zip(low_t, high_t)):
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ValidationError(f"box bound low[{i}]={lo} > high[{i}]={hi}")
        object.__setattr__(self, "low", low_t)
        object.__setattr__(self, "high", high_t)

    @property
    def dim(self) -> int:
        return len(self.low)

    def contains(self, sample) -> bool:
        values = _as_vector(sample)
        if values is None or len(values) != self.dim:
            return False
        return all(
            not math.isnan(v) and lo <= v <= hi
            for v, lo, hi in zip(values, self.low, self.high)
        )

    def sample(self, rng: Rng) -> list[float]:
        """Uniform per-dimension draw in [low, high]. Requires finite bounds."""
        for i, (lo, hi) in enumerate(zip(self.low, self.high)):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValidationError(
                    f"cannot sample dimension {i} with unbounded range [{lo}, {hi}]"
                )
        return [rng.uniform(lo, hi) for lo, hi in zip(self.low, self.high)]


@dataclass(frozen=True)
class Discrete:
    """Finite set {0, ..., n-1}."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"discrete space needs n >= 1, got {self.n!r}")

    def contains(self, sample) -> bool:
        if isinstance(sample, bool) or not isinstance(sample, int):
            return False
        return 0 <= sample < self.n

    def sample(self, rng: Rng) -> int:
        return rng.integer(self.n)


Space = Union[Box, Discrete]


def _as_vector(sample) -> tuple[float, ...] | None:
    if isinstance(sample, (int, float)) and not isinstance(sample, bool):
        return (float(sample),)
    if isinstance(sample, (list, tuple)):
        try:
            return tuple(float(v) for v in sample)
        except (TypeError, ValueError):
            return None
    return None


def require_in_space(space: Space, sample, what: str = "action"):
    """Raise ValidationError unless sample is a member of space."""
    if not space.contains(sample):
        raise ValidationError(f"{what} {sample!r} is not in {space}")


def space_to_jsonable(space: Space) -> dict:
    """Wire description of a space; non-finite bounds become null."""
    if isinstance(space, Box):
        return {
            "kind": "box",
            "low": [v if math.isfinite(v) else None for v in space.low],
            "high": [v if math.isfinite(v) else None for v in space.high],
        }
    return {"kind": "discrete", "n": space.n}
