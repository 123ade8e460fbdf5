/**
 * Gym-style bindings for envrig environments.
 *
 * `make(id)` spawns one backend environment (`envrig serve` over stdio) and
 * returns a handle with the usual reset/step/seed/render/close surface.  The
 * bindings are a pure veneer: no caching, no conversion, no stochasticity --
 * every number comes verbatim from the backend, and step responses are the
 * same JSON-Lines records the backend writes into trajectory dumps.
 */

import { LineClient } from "./protocol.js";
import { type Space, spaceDim } from "./spaces.js";

export { type BoxSpace, type DiscreteSpace, type Space, spaceContains, spaceDim } from "./spaces.js";

export class EnvError extends Error {
  readonly type: string;
  readonly ids?: string[];

  constructor(type: string, message: string, ids?: string[]) {
    super(message);
    this.type = type;
    this.ids = ids;
  }
}

export interface MakeOptions {
  engine?: "euler-si" | "rk4";
  seed?: number;
  initNoise?: number;
  /** Python interpreter used to host the backend (default: $ENVRIG_PYTHON or python3). */
  pythonPath?: string;
}

export interface StepInfo {
  /** simulated time after the step, seconds */
  t: number;
  /** the verbatim record line, byte-identical to the backend's dump format */
  rawRecord: string;
}

export type StepResult = [
  observation: number[],
  reward: number,
  done: boolean,
  info: StepInfo,
];

interface Hello {
  protocol: number;
  version: string;
  env: string;
  engine: string;
  seed: number;
  physics_dt: number;
  agent_period: number;
  observation_space: Space;
  action_space: Space;
}

function parseLine(line: string): Record<string, unknown> {
  let value: unknown;
  try {
    value = JSON.parse(line);
  } catch {
    throw new EnvError("ProtocolError", `unparseable backend line: ${line}`);
  }
  if (typeof value !== "object" || value === null) {
    throw new EnvError("ProtocolError", `unexpected backend line: ${line}`);
  }
  return value as Record<string, unknown>;
}

function throwIfError(obj: Record<string, unknown>): void {
  if ("error" in obj) {
    const err = obj.error as { type?: string; message?: string; ids?: string[] };
    throw new EnvError(err.type ?? "EnvrigError", err.message ?? "backend error", err.ids);
  }
}

export class BoundEnv {
  readonly id: string;
  readonly engine: string;
  readonly initialSeed: number;
  readonly version: string;
  readonly physicsDt: number;
  readonly agentPeriod: number;
  readonly observationSpace: Space;
  readonly actionSpace: Space;

  private client: LineClient;
  private closed = false;

  constructor(client: LineClient, hello: Hello) {
    this.client = client;
    this.id = hello.env;
    this.engine = hello.engine;
    this.initialSeed = hello.seed;
    this.version = hello.version;
    this.physicsDt = hello.physics_dt;
    this.agentPeriod = hello.agent_period;
    this.observationSpace = hello.observation_space;
    this.actionSpace = hello.action_space;
  }

  get observationDim(): number {
    return spaceDim(this.observationSpace);
  }

  private async roundTrip(payload: unknown): Promise<Record<string, unknown>> {
    if (this.closed) {
      throw new EnvError("EnvClosedError", "environment is closed");
    }
    const obj = parseLine(await this.client.request(payload));
    throwIfError(obj);
    return obj;
  }

  async reset(): Promise<number[]> {
    const response = await this.roundTrip({ op: "reset" });
    return response.obs as number[];
  }

  async step(action: number | number[]): Promise<StepResult> {
    const act = typeof action === "number" ? [action] : action;
    if (this.closed) {
      throw new EnvError("EnvClosedError", "environment is closed");
    }
    const line = await this.client.request({ op: "step", act });
    const record = parseLine(line);
    throwIfError(record);
    return [
      record.obs as number[],
      record.rew as number,
      record.done as boolean,
      { t: record.t as number, rawRecord: line },
    ];
  }

  /** Re-key the backend's stochastic streams; returns [label, childSeed] pairs. */
  async seed(master: number): Promise<Array<[string, string]>> {
    const response = await this.roundTrip({ op: "seed", seed: master });
    return response.children as Array<[string, string]>;
  }

  async render(mode: "none" | "text" | "file" = "none", path?: string): Promise<string | null> {
    const response = await this.roundTrip({ op: "render", mode, path });
    return (response.text as string | null) ?? null;
  }

  async close(): Promise<void> {
    if (this.closed) {
      return;
    }
    this.closed = true;
    try {
      await this.client.request({ op: "close" });
    } catch {
      // the backend may already be gone; disposal below is what matters
    }
    this.client.dispose();
  }
}

/** Construct one environment through the backend registry. */
export async function make(envId: string, options: MakeOptions = {}): Promise<BoundEnv> {
  const python = options.pythonPath ?? process.env.ENVRIG_PYTHON ?? "python3";
  const args = ["-m", "envrig.cli", "serve", "--env", envId];
  if (options.engine !== undefined) {
    args.push("--engine", options.engine);
  }
  if (options.seed !== undefined) {
    args.push("--seed", String(options.seed));
  }
  if (options.initNoise !== undefined) {
    args.push("--init-noise", String(options.initNoise));
  }
  const client = new LineClient(python, args);
  let hello: Record<string, unknown>;
  try {
    hello = parseLine(await client.nextLine());
    throwIfError(hello);
  } catch (err) {
    client.dispose();
    throw err;
  }
  return new BoundEnv(client, hello as unknown as Hello);
}
