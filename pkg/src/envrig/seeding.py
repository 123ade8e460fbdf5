"""Deterministic seeding: master-seed derivation and the framework PRNG.

Every stochastic component in the framework draws from a :class:`Rng` stream
keyed by ``SeedTree(master).child(label)``.  The derivation is pure, so a
master seed plus a component label always reproduces the same stream, which is
what makes whole experiments replayable from a single integer.

The generator is splitmix64 (Steele, Lea & Flood's SplittableRandom finalizer).
It is implemented here rather than taken from a library so the bit stream is
pinned by this package alone: reproducibility is guaranteed within one
implementation, not across languages or library versions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# FNV-1a 64-bit parameters, used to hash component labels.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_INV_2_53 = 1.0 / (1 << 53)


def mix64(x: int) -> int:
    """splitmix64 avalanche finalizer: a bijective 64-bit mix."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def label_hash(label: str) -> int:
    """Stable 64-bit FNV-1a hash of a component label (UTF-8)."""
    h = _FNV_OFFSET
    for byte in label.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def derive_child_seed(master: int, label: str) -> int:
    """Child seed for one component: mix64(master XOR hash(label)).

    Pure in (master, label); distinct labels give distinct children for the
    handful of labels the framework uses.
    """
    return mix64((master & _MASK64) ^ label_hash(label))


@dataclass(frozen=True)
class SeedTree:
    """Derives per-component child seeds from one 64-bit master seed."""

    master: int

    def __post_init__(self):
        object.__setattr__(self, "master", self.master & _MASK64)

    def child(self, label: str) -> int:
        return derive_child_seed(self.master, label)

    def stream(self, label: str) -> "Rng":
        return Rng(self.child(label))


@dataclass
class Rng:
    """splitmix64 stream. One instance per stochastic component, never shared."""

    seed: int
    _state: int = field(init=False, repr=False)

    def __post_init__(self):
        self.seed &= _MASK64
        self._state = self.seed

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN_GAMMA) & _MASK64
        return mix64(self._state)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        """Uniform double in [low, high): 53 random mantissa bits."""
        u = (self.next_u64() >> 11) * _INV_2_53
        return low + u * (high - low)

    def integer(self, n: int) -> int:
        """Uniform integer in {0, ..., n-1}, rejection-sampled (no modulo bias)."""
        if n <= 0:
            raise ValueError(f"n must be positive, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n
