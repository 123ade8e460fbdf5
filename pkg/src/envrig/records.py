"""Trajectory records and the JSON-Lines dump format.

One dump is a header line followed by one StepRecord per line.  Keys and float
formatting are the external contract: keys are exactly ``t``, ``obs``, ``act``,
``rew``, ``done``; reals use Python's shortest round-trip repr, compact
separators, no trailing whitespace.  Byte-identical dumps are how the
framework's reproducibility claims are checked, so nothing here may depend on
anything but the record values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import DumpFormatError

FORMAT_VERSION = "0.1.0"


@dataclass(frozen=True)
class StepRecord:
    """One transition of the replayable trajectory."""

    t: float
    obs: tuple[float, ...]
    act: tuple[float, ...]
    rew: float
    done: bool

    def __post_init__(self):
        object.__setattr__(self, "obs", tuple(float(v) for v in self.obs))
        object.__setattr__(self, "act", tuple(float(v) for v in self.act))
        for name in ("t", "rew"):
            if not math.isfinite(getattr(self, name)):
                raise DumpFormatError(f"non-finite {name} in step record")
        if any(not math.isfinite(v) for v in self.obs + self.act):
            raise DumpFormatError("non-finite value in step record")


@dataclass(frozen=True)
class DumpHeader:
    """Provenance line so replay can refuse incompatible dumps."""

    env: str
    engine: str
    seed: int
    physics_dt: float
    agent_period: float
    version: str = FORMAT_VERSION


def serialize_record(record: StepRecord) -> str:
    return json.dumps(
        {
            "t": record.t,
            "obs": list(record.obs),
            "act": list(record.act),
            "rew": record.rew,
            "done": record.done,
        },
        separators=(",", ":"),
        allow_nan=False,
    )


def serialize_header(header: DumpHeader) -> str:
    return json.dumps(
        {
            "version": header.version,
            "env": header.env,
            "engine": header.engine,
            "seed": header.seed,
            "physics_dt": header.physics_dt,
            "agent_period": header.agent_period,
        },
        separators=(",", ":"),
        allow_nan=False,
    )


def _parse_json_line(line: str, line_number: int) -> dict:
    try:
        value = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DumpFormatError(f"bad JSON ({exc.msg})", line_number) from exc
    if not isinstance(value, dict):
        raise DumpFormatError("expected a JSON object", line_number)
    return value


def parse_header(line: str, line_number: int = 1) -> DumpHeader:
    obj = _parse_json_line(line, line_number)
    try:
        return DumpHeader(
            env=str(obj["env"]),
            engine=str(obj["engine"]),
            seed=int(obj["seed"]),
            physics_dt=float(obj["physics_dt"]),
            agent_period=float(obj["agent_period"]),
            version=str(obj["version"]),
        )
    except KeyError as exc:
        raise DumpFormatError(f"header missing key {exc.args[0]!r}", line_number) from exc


def parse_record(line: str, line_number: int) -> StepRecord:
    obj = _parse_json_line(line, line_number)
    missing = {"t", "obs", "act", "rew", "done"} - obj.keys()
    if missing:
        raise DumpFormatError(f"record missing keys {sorted(missing)}", line_number)
    if not isinstance(obj["done"], bool):
        raise DumpFormatError("done must be a boolean", line_number)
    try:
        return StepRecord(
            t=float(obj["t"]),
            obs=tuple(float(v) for v in obj["obs"]),
            act=tuple(float(v) for v in obj["act"]),
            rew=float(obj["rew"]),
            done=obj["done"],
        )
    except (TypeError, ValueError) as exc:
        raise DumpFormatError(f"bad record value: {exc}", line_number) from exc


def parse_dump(text: str) -> tuple[DumpHeader, list[StepRecord]]:
    """Parse a full dump. Raises DumpFormatError with the offending line number."""
    lines = text.splitlines()
    if not lines:
        raise DumpFormatError("empty dump", 1)
    header = parse_header(lines[0], 1)
    records = [parse_record(line, i) for i, line in enumerate(lines[1:], start=2)]
    return header, records
