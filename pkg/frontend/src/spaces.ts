/** Mirrored action/observation space descriptors, as sent by the backend. */

export interface BoxSpace {
  kind: "box";
  /** null encodes an unbounded dimension */
  low: Array<number | null>;
  high: Array<number | null>;
}

export interface DiscreteSpace {
  kind: "discrete";
  n: number;
}

export type Space = BoxSpace | DiscreteSpace;

export function spaceDim(space: Space): number {
  return space.kind === "box" ? space.low.length : 1;
}

export function spaceContains(space: Space, sample: number | number[]): boolean {
  if (space.kind === "discrete") {
    return (
      typeof sample === "number" && Number.isInteger(sample) && sample >= 0 && sample < space.n
    );
  }
  const values = typeof sample === "number" ? [sample] : sample;
  if (values.length !== space.low.length) {
    return false;
  }
  return values.every((v, i) => {
    if (Number.isNaN(v)) {
      return false;
    }
    const lo = space.low[i];
    const hi = space.high[i];
    return (lo === null || v >= lo) && (hi === null || v <= hi);
  });
}
