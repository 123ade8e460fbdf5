/**
 * Line-oriented JSON protocol over a child process's stdio.
 *
 * The backend answers every request line with exactly one response line, so
 * requests are serialized through a promise chain: one in flight at a time,
 * responses matched to requests in order.
 */

import { type ChildProcessByStdio, spawn } from "node:child_process";
import type { Readable, Writable } from "node:stream";

export class ProtocolError extends Error {}

export class LineClient {
  private child: ChildProcessByStdio<Writable, Readable, null>;
  private buffer = "";
  private pending: string[] = [];
  private waiters: Array<{
    resolve: (line: string) => void;
    reject: (err: Error) => void;
  }> = [];
  private queue: Promise<unknown> = Promise.resolve();
  private exitError: Error | null = null;

  constructor(command: string, args: string[]) {
    this.child = spawn(command, args, { stdio: ["pipe", "pipe", "inherit"] });
    this.child.stdout.setEncoding("utf-8");
    this.child.stdout.on("data", (chunk: string) => this.onData(chunk));
    this.child.on("error", (err) =>
      this.fail(new ProtocolError(`backend failed to start: ${err.message}`)),
    );
    this.child.on("close", () => this.fail(new ProtocolError("backend exited")));
  }

  private onData(chunk: string): void {
    this.buffer += chunk;
    let index;
    while ((index = this.buffer.indexOf("\n")) >= 0) {
      this.pending.push(this.buffer.slice(0, index));
      this.buffer = this.buffer.slice(index + 1);
    }
    this.drain();
  }

  private drain(): void {
    while (this.pending.length > 0 && this.waiters.length > 0) {
      const waiter = this.waiters.shift()!;
      waiter.resolve(this.pending.shift()!);
    }
  }

  private fail(err: Error): void {
    this.exitError = this.exitError ?? err;
    this.drain(); // lines received before exit still get delivered
    for (const waiter of this.waiters.splice(0)) {
      waiter.reject(this.exitError);
    }
  }

  /** Await the next line not yet claimed by a request (the hello banner). */
  nextLine(): Promise<string> {
    if (this.pending.length > 0) {
      return Promise.resolve(this.pending.shift()!);
    }
    if (this.exitError) {
      return Promise.reject(this.exitError);
    }
    return new Promise((resolve, reject) => {
      this.waiters.push({ resolve, reject });
    });
  }

  /** Send one request line and await its single response line. */
  request(payload: unknown): Promise<string> {
    const run = async () => {
      if (this.exitError) {
        throw this.exitError;
      }
      const response = this.nextLine();
      this.child.stdin.write(JSON.stringify(payload) + "\n");
      return response;
    };
    const result = this.queue.then(run, run);
    this.queue = result.catch(() => undefined);
    return result;
  }

  dispose(): void {
    this.child.stdin.end();
    this.child.kill();
  }

  get exited(): boolean {
    return this.exitError !== null;
  }
}
