/** Locate the first timestep where two candidate outputs disagree. */
import type { OutputJson } from "./types.js";
import { cellEq, isError, valueEq } from "./values.js";

/**
 * First differing timestep, or null when the outputs are identical.
 * A kind mismatch, an error on one side, or a differing behavior init all
 * surface at step 0: the disagreement is visible from the start of the lane.
 */
export function firstDiff(a: OutputJson, b: OutputJson): number | null {
  if (isError(a) || isError(b)) {
    return isError(a) && isError(b) ? null : 0;
  }
  if (a.kind !== b.kind) return 0;
  if (a.kind === "behavior" && b.kind === "behavior" && !valueEq(a.init, b.init)) {
    return 0;
  }
  const n = Math.max(a.cells.length, b.cells.length);
  for (let t = 0; t < n; t++) {
    if (!cellEq(a.cells[t] ?? null, b.cells[t] ?? null)) return t;
  }
  return null;
}
