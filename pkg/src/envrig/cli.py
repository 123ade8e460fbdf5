"""Command-line front end.

Subcommands: run rollouts, verify determinism across repeats, benchmark
throughput, replay dumps bit-exactly, parse/validate model files, and serve an
environment over stdio for out-of-process bindings.

Exit codes are a stable contract for CI scripting: 0 success, 1 property or
verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time

from .engines import EngineId
from .errors import DumpFormatError, EnvrigError, UnknownEnvError, ValidationError
from .model import has_errors, parse_sdf, serialize_sdf, validate
from .records import (
    FORMAT_VERSION,
    DumpHeader,
    StepRecord,
    parse_dump,
    serialize_header,
    serialize_record,
)
from .registry import make_env, make_vector_env
from .runtime import SimulatedRuntime
from .seeding import Rng
from .spaces import space_to_jsonable

USAGE_ERROR = 2
CHECK_FAILED = 1

_ENGINE_CHOICES = [e.value for e in EngineId]


# --- policies -----------------------------------------------------------------


def load_action_script(path: str) -> list[list[float]]:
    """JSON-Lines action file: one action array (or scalar) per line."""
    actions: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                value = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{i}: bad action JSON: {exc.msg}") from exc
            if isinstance(value, (int, float)):
                value = [float(value)]
            if not isinstance(value, list):
                raise ValidationError(f"{path}:{i}: action must be a number or array")
            actions.append([float(v) for v in value])
    return actions


def make_policy(spec: str, env: SimulatedRuntime):
    """Resolve a policy spec {zero, random, script:PATH} to a step -> action map."""
    if spec == "zero":
        dim = len(env.action_space.low)
        zero = [0.0] * dim
        return lambda step: list(zero)
    if spec == "random":
        stream = Rng(env.seed_tree.child("policy"))
        space = env.action_space
        return lambda step: space.sample(stream)
    if spec.startswith("script:"):
        actions = load_action_script(spec[len("script:"):])

        def scripted(step: int):
            if step >= len(actions):
                raise ValidationError(
                    f"action script exhausted after {len(actions)} steps"
                )
            return actions[step]

        return scripted
    raise ValidationError(f"unknown policy {spec!r}; expected zero, random or script:PATH")


# --- rollouts -------------------------------------------------------------------


def dump_header_for(env: SimulatedRuntime) -> DumpHeader:
    return DumpHeader(
        env=env.metadata.id,
        engine=env.config.engine.value,
        seed=env.config.seed,
        physics_dt=env.config.physics_dt,
        agent_period=env.config.agent_period,
    )


def run_rollout(env, steps: int, policy, sink: io.TextIOBase | None = None) -> dict:
    """Step the env a fixed number of times, auto-resetting on done.

    Writes header + one record per step to sink when given.  Returns the
    episode summary.
    """
    if sink is not None:
        sink.write(serialize_header(dump_header_for(env)) + "\n")
    env.reset()
    episodes = 1
    total_reward = 0.0
    last_done = False
    for k in range(steps):
        if last_done:
            env.reset()
            episodes += 1
        action = policy(k)
        obs, reward, done, _ = env.step(action)
        total_reward += reward
        last_done = done
        if sink is not None:
            record = StepRecord(
                t=env.sim_time,
                obs=tuple(obs),
                act=tuple(action) if isinstance(action, (list, tuple)) else (action,),
                rew=reward,
                done=done,
            )
            sink.write(serialize_record(record) + "\n")
    return {
        "steps": steps,
        "episodes": episodes,
        "total_reward": total_reward,
        "terminal_reason": "episode terminated" if last_done else "step budget exhausted",
    }


# --- subcommands ------------------------------------------------------------------


def cmd_run(args) -> int:
    env = make_env(
        args.env,
        engine=args.engine,
        seed=args.seed,
        rtf=args.rtf,
        init_noise=args.init_noise,
    )
    policy = make_policy(args.policy, env)
    sink = io.StringIO() if args.dump else None
    summary = run_rollout(env, args.steps, policy, sink)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(sink.getvalue())
    print(
        f"env={args.env} steps={summary['steps']} episodes={summary['episodes']} "
        f"total_reward={summary['total_reward']:.6g} ({summary['terminal_reason']})"
    )
    env.close()
    return 0


def cmd_verify_determinism(args) -> int:
    if args.repeats < 2:
        print("verify-determinism needs --repeats >= 2", file=sys.stderr)
        return USAGE_ERROR

    def fresh_env():
        return make_env(args.env, engine=args.engine, seed=args.seed)

    # One shared random action script for every repeat.
    probe = fresh_env()
    stream = Rng(probe.seed_tree.child("policy"))
    script = [probe.action_space.sample(stream) for _ in range(args.steps)]
    probe.close()

    dumps: list[str] = []
    for _ in range(args.repeats):
        env = fresh_env()
        sink = io.StringIO()
        run_rollout(env, args.steps, lambda k: script[k], sink)
        env.close()
        dumps.append(sink.getvalue())

    reference = dumps[0]
    for which, candidate in enumerate(dumps[1:], start=2):
        if candidate != reference:
            ref_lines = reference.splitlines()
            cand_lines = candidate.splitlines()
            step = next(
                (
                    i
                    for i, (a, b) in enumerate(zip(ref_lines, cand_lines))
                    if a != b
                ),
                min(len(ref_lines), len(cand_lines)),
            )
            print(
                f"DETERMINISM FAILURE: run {which} diverges from run 1 at step {step}",
                file=sys.stderr,
            )
            return CHECK_FAILED
    print(
        f"deterministic: {args.repeats} runs of {args.steps} steps on {args.env} "
        f"(seed {args.seed}) are byte-identical"
    )
    return 0


def cmd_benchmark(args) -> int:
    instances = args.parallel or 1
    steps = args.steps
    if instances == 1:
        env = make_env(args.env, engine=args.engine, seed=args.seed, rtf=0.0)
        dim = len(env.action_space.low)
        zero = [0.0] * dim
        env.reset()
        start = time.perf_counter()
        done = False
        for _ in range(steps):
            if done:
                env.reset()
            _, _, done, _ = env.step(zero)
        wall = time.perf_counter() - start
        ticks_per_step = env.config.ticks_per_step
        agent_period = env.config.agent_period
        env.close()
    else:
        venv = make_vector_env(
            args.env,
            instances,
            seed=args.seed,
            num_workers=args.workers,
            engine=args.engine,
        )
        dim = len(venv.envs[0].action_space.low)
        actions = [[0.0] * dim for _ in range(instances)]
        venv.reset()
        start = time.perf_counter()
        for _ in range(steps):
            venv.step(actions)
        wall = time.perf_counter() - start
        ticks_per_step = venv.envs[0].config.ticks_per_step
        agent_period = venv.envs[0].config.agent_period
        venv.close()

    sim_seconds = steps * agent_period
    report = {
        "steps": steps,
        "instances": instances,
        "wall_seconds": wall,
        "sim_seconds": sim_seconds,
        "achieved_rtf": sim_seconds / wall,
        "ticks_per_second": steps * ticks_per_step * instances / wall,
    }
    print(json.dumps(report, separators=(",", ":")))
    print(
        f"{args.env}: {report['ticks_per_second']:.0f} ticks/s, "
        f"achieved RTF {report['achieved_rtf']:.1f}",
        file=sys.stderr,
    )
    return 0


def cmd_replay(args) -> int:
    try:
        with open(args.dump, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read dump: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        header, records = parse_dump(text)
    except DumpFormatError as exc:
        print(f"malformed dump: {exc}", file=sys.stderr)
        return CHECK_FAILED

    if header.version != FORMAT_VERSION:
        print(
            f"incompatible dump: version {header.version} != {FORMAT_VERSION}",
            file=sys.stderr,
        )
        return USAGE_ERROR
    for flag, value in (("--env", args.env), ("--engine", args.engine), ("--seed", args.seed)):
        recorded = {
            "--env": header.env,
            "--engine": header.engine,
            "--seed": header.seed,
        }[flag]
        if value is not None and value != recorded:
            print(
                f"{flag} {value} conflicts with dump header ({recorded})",
                file=sys.stderr,
            )
            return USAGE_ERROR

    env = make_env(
        header.env,
        engine=header.engine,
        seed=header.seed,
        physics_dt=header.physics_dt,
        agent_period=header.agent_period,
    )
    env.reset()
    last_done = False
    for i, record in enumerate(records, start=1):
        if last_done:
            env.reset()
        obs, reward, done, _ = env.step(list(record.act))
        recomputed = StepRecord(
            t=env.sim_time, obs=tuple(obs), act=record.act, rew=reward, done=done
        )
        if serialize_record(recomputed) != serialize_record(record):
            print(f"REPLAY MISMATCH at step {i}", file=sys.stderr)
            env.close()
            return CHECK_FAILED
        last_done = done
    env.close()
    print(f"replay ok: {len(records)} steps match bit-exactly")
    return 0


def cmd_parse(args) -> int:
    try:
        raw = open(args.model, "rb").read()
    except OSError as exc:
        print(f"cannot read model: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        print(f"{args.model}:1:1: error: not valid UTF-8 ({exc.reason})", file=sys.stderr)
        return CHECK_FAILED

    robot_model, diagnostics = parse_sdf(text)
    if robot_model is not None:
        diagnostics = diagnostics + validate(robot_model)
    for diag in diagnostics:
        print(f"{args.model}:{diag}", file=sys.stderr)
    if robot_model is None or has_errors(diagnostics):
        return CHECK_FAILED
    if args.print:
        sys.stdout.write(serialize_sdf(robot_model))
    return 0


def cmd_serve(args) -> int:
    out = sys.stdout

    def emit(obj: dict):
        out.write(json.dumps(obj, separators=(",", ":")) + "\n")
        out.flush()

    try:
        env = make_env(
            args.env, engine=args.engine, seed=args.seed, init_noise=args.init_noise
        )
    except UnknownEnvError as exc:
        emit({"error": {"type": "UnknownEnvError", "message": str(exc), "ids": exc.known}})
        return USAGE_ERROR

    emit(
        {
            "protocol": 1,
            "version": FORMAT_VERSION,
            "env": env.metadata.id,
            "engine": env.config.engine.value,
            "seed": env.config.seed,
            "physics_dt": env.config.physics_dt,
            "agent_period": env.config.agent_period,
            "observation_space": space_to_jsonable(env.observation_space),
            "action_space": space_to_jsonable(env.action_space),
        }
    )

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            op = request.get("op")
            if op == "reset":
                emit({"obs": env.reset()})
            elif op == "step":
                action = request.get("act")
                obs, reward, done, _ = env.step(action)
                record = StepRecord(
                    t=env.sim_time,
                    obs=tuple(obs),
                    act=tuple(float(v) for v in action),
                    rew=reward,
                    done=done,
                )
                out.write(serialize_record(record) + "\n")
                out.flush()
            elif op == "seed":
                children = env.seed(int(request["seed"]))
                emit({"children": [[label, str(child)] for label, child in children]})
            elif op == "render":
                text = env.render(request.get("mode", "none"), request.get("path"))
                emit({"text": text})
            elif op == "close":
                env.close()
                emit({"ok": True})
                return 0
            else:
                emit({"error": {"type": "ValidationError", "message": f"unknown op {op!r}"}})
        except json.JSONDecodeError as exc:
            emit({"error": {"type": "ValidationError", "message": f"bad request JSON: {exc.msg}"}})
        except EnvrigError as exc:
            emit({"error": {"type": type(exc).__name__, "message": str(exc)}})
    env.close()
    return 0


# --- argument parsing ------------------------------------------------------------


def _add_env_flags(parser: argparse.ArgumentParser, with_rtf: bool = False):
    parser.add_argument("--env", required=True, help="registered environment id")
    parser.add_argument("--engine", choices=_ENGINE_CHOICES, default=None)
    parser.add_argument("--seed", type=int, default=0)
    if with_rtf:
        parser.add_argument("--rtf", type=float, default=0.0, help="0 = unbounded")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="envrig", description="reproducible robot RL environments"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a rollout")
    _add_env_flags(run, with_rtf=True)
    run.add_argument("--steps", type=int, default=500)
    run.add_argument("--policy", default="zero", help="zero, random or script:PATH")
    run.add_argument("--dump", default=None, help="write a JSON-Lines trajectory dump")
    run.add_argument(
        "--init-noise",
        type=float,
        default=None,
        help="override the task's initial-state noise amplitude",
    )
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify-determinism", help="repeat a rollout, compare dumps")
    _add_env_flags(verify)
    verify.add_argument("--steps", type=int, default=1000)
    verify.add_argument("--repeats", type=int, default=3)
    verify.set_defaults(func=cmd_verify_determinism)

    bench = sub.add_parser("benchmark", help="measure throughput at rtf=0")
    _add_env_flags(bench)
    bench.add_argument("--steps", type=int, default=10000)
    bench.add_argument("--parallel", type=int, default=None, help="vector env instances")
    bench.add_argument("--workers", type=int, default=None)
    bench.set_defaults(func=cmd_benchmark)

    replay = sub.add_parser("replay", help="re-run a dump and compare bit-exactly")
    replay.add_argument("dump", help="trajectory dump path")
    replay.add_argument("--env", default=None)
    replay.add_argument("--engine", choices=_ENGINE_CHOICES, default=None)
    replay.add_argument("--seed", type=int, default=None)
    replay.set_defaults(func=cmd_replay)

    parse = sub.add_parser("parse", help="parse and validate a model file")
    parse.add_argument("model", help="path to an .sdf file")
    parse.add_argument("--print", action="store_true", help="echo the canonical form")
    parse.set_defaults(func=cmd_parse)

    serve = sub.add_parser("serve", help="serve one environment over stdio (JSON lines)")
    _add_env_flags(serve)
    serve.add_argument("--init-noise", type=float, default=None)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return args.func(args)
    except UnknownEnvError as exc:
        print(str(exc), file=sys.stderr)
        return USAGE_ERROR
    except ValidationError as exc:
        print(f"invalid invocation: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except EnvrigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
