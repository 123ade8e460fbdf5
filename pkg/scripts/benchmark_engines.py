#!/usr/bin/env python3
"""Throughput sweep: ticks/second for every task under both engines."""

import argparse
import time

from envrig import EngineId, make_env, registered_ids


def measure(env_id: str, engine: EngineId, steps: int) -> dict:
    env = make_env(env_id, engine=engine, seed=0)
    zero = [0.0] * len(env.action_space.low)
    env.reset()
    start = time.perf_counter()
    for _ in range(steps):
        if env.done:
            env.reset()
        env.step(zero)
    wall = time.perf_counter() - start
    ticks = steps * env.config.ticks_per_step
    sim_seconds = steps * env.config.agent_period
    env.close()
    return {
        "ticks_per_second": ticks / wall,
        "achieved_rtf": sim_seconds / wall,
        "wall": wall,
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=5000)
    args = parser.parse_args()

    print(f"{'env':18s} {'engine':9s} {'ticks/s':>10s} {'RTF':>8s} {'wall s':>8s}")
    for env_id in registered_ids():
        for engine in EngineId:
            r = measure(env_id, engine, args.steps)
            print(
                f"{env_id:18s} {engine.value:9s} {r['ticks_per_second']:10.0f} "
                f"{r['achieved_rtf']:8.1f} {r['wall']:8.2f}"
            )


if __name__ == "__main__":
    main()
