/**
 * Gym-API conformance checks for every registered environment id: spaces are
 * present and well-formed, reset returns an in-space observation, step returns
 * the (obs, reward, done, info) 4-tuple, errors surface as exceptions, and
 * handles are independent.
 */

import { afterEach, describe, expect, it } from "vitest";
import { BoundEnv, EnvError, make, spaceContains, spaceDim } from "../src/index.js";

const ENV_IDS = ["cartpole-balance", "cartpole-swingup", "pendulum-swingup"] as const;
const OBS_DIMS: Record<string, number> = {
  "cartpole-balance": 4,
  "cartpole-swingup": 5,
  "pendulum-swingup": 3,
};

const open: BoundEnv[] = [];

async function makeTracked(id: string, options = {}): Promise<BoundEnv> {
  const env = await make(id, options);
  open.push(env);
  return env;
}

afterEach(async () => {
  await Promise.all(open.splice(0).map((env) => env.close()));
});

describe.each(ENV_IDS)("conformance: %s", (envId) => {
  it("mirrors the backend spaces", async () => {
    const env = await makeTracked(envId, { seed: 1 });
    expect(env.id).toBe(envId);
    expect(env.observationSpace.kind).toBe("box");
    expect(spaceDim(env.observationSpace)).toBe(OBS_DIMS[envId]);
    expect(env.actionSpace).toEqual({ kind: "box", low: [-1], high: [1] });
    expect(env.agentPeriod).toBeCloseTo(0.01, 12);
  });

  it("reset returns an observation inside the observation space", async () => {
    const env = await makeTracked(envId, { seed: 7 });
    const obs = await env.reset();
    expect(obs).toHaveLength(OBS_DIMS[envId]);
    expect(spaceContains(env.observationSpace, obs)).toBe(true);
  });

  it("step returns the 4-tuple with well-typed fields", async () => {
    const env = await makeTracked(envId, { seed: 7 });
    await env.reset();
    const [obs, reward, done, info] = await env.step([0.5]);
    expect(Array.isArray(obs)).toBe(true);
    expect(obs).toHaveLength(OBS_DIMS[envId]);
    expect(typeof reward).toBe("number");
    expect(typeof done).toBe("boolean");
    expect(info.t).toBeCloseTo(0.01, 12);
    expect(typeof info.rawRecord).toBe("string");
    expect(spaceContains(env.observationSpace, obs)).toBe(true);
  });

  it("surfaces backend validation errors with the original message", async () => {
    const env = await makeTracked(envId, { seed: 7 });
    await env.reset();
    await expect(env.step([5.0])).rejects.toThrowError(/not in/);
    await expect(env.step([5.0])).rejects.toBeInstanceOf(EnvError);
  });

  it("runs whole episodes to termination", async () => {
    const env = await makeTracked(envId, { seed: 3 });
    await env.reset();
    let done = false;
    let steps = 0;
    while (!done) {
      const result = await env.step([1.0]);
      done = result[2];
      steps += 1;
      expect(steps).toBeLessThanOrEqual(500);
    }
    // stepping a finished episode is an error that instructs resetting
    await expect(env.step([0.0])).rejects.toThrowError(/reset/);
    await env.reset();
    const [, , doneAfterReset] = await env.step([0.0]);
    expect(doneAfterReset).toBe(false);
  });
});

describe("make()", () => {
  it("rejects unknown ids and lists the registry", async () => {
    await expect(make("nosuch")).rejects.toThrowError(/cartpole-balance/);
    try {
      await make("nosuch");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(EnvError);
      expect((err as EnvError).ids).toContain("pendulum-swingup");
    }
  });

  it("creates independent instances", async () => {
    const a = await makeTracked("cartpole-balance", { seed: 11 });
    const b = await makeTracked("cartpole-balance", { seed: 11 });
    const obsA = await a.reset();
    for (let k = 0; k < 5; k += 1) {
      await a.step([0.3]);
    }
    const obsB = await b.reset();
    expect(obsB).toEqual(obsA); // same seed, same first draw: b untouched by a
  });

  it("honors engine and seed overrides", async () => {
    const env = await makeTracked("pendulum-swingup", { engine: "rk4", seed: 99 });
    expect(env.engine).toBe("rk4");
    expect(env.initialSeed).toBe(99);
  });
});

describe("handle lifecycle", () => {
  it("seed() rewinds the stochastic streams deterministically", async () => {
    const env = await makeTracked("cartpole-balance", { seed: 0 });
    const children = await env.seed(5);
    expect(children).toEqual(await env.seed(5));
    const first = await env.reset();
    await env.seed(5);
    expect(await env.reset()).toEqual(first);
    const other = await env.seed(6);
    expect(other.map(([, child]) => child)).not.toEqual(children.map(([, child]) => child));
  });

  it("renders text state lines", async () => {
    const env = await makeTracked("cartpole-balance", { seed: 1, initNoise: 0 });
    await env.reset();
    const text = await env.render("text");
    expect(text).toContain("x=0.0000");
    expect(text).toContain("theta=0.0000");
    expect(await env.render("none")).toBeNull();
  });

  it("rejects operations after close", async () => {
    const env = await make("cartpole-balance", { seed: 1 });
    await env.reset();
    await env.close();
    await expect(env.step([0.0])).rejects.toThrowError(/closed/);
    await expect(env.reset()).rejects.toThrowError(/closed/);
    await env.close(); // idempotent
  });
});
