import type { CellJson, OutputJson, SignalJson, ValueJson } from "./types.js";

export function valueEq(a: ValueJson, b: ValueJson): boolean {
  if (a.t !== b.t) return false;
  if (a.t === "pair" && b.t === "pair") {
    return a.v[0] === b.v[0] && a.v[1] === b.v[1];
  }
  return a.v === b.v;
}

export function cellEq(a: CellJson, b: CellJson): boolean {
  if (a === null || b === null) return a === b;
  return valueEq(a, b);
}

export function signalEq(a: SignalJson, b: SignalJson): boolean {
  if (a.kind !== b.kind) return false;
  if (a.kind === "behavior" && b.kind === "behavior") {
    if (!valueEq(a.init, b.init)) return false;
  }
  if (a.cells.length !== b.cells.length) return false;
  return a.cells.every((c, i) => cellEq(c, b.cells[i] ?? null));
}

export function isError(out: OutputJson): out is { error: true } {
  return "error" in out;
}

export function outputEq(a: OutputJson, b: OutputJson): boolean {
  if (isError(a) || isError(b)) return isError(a) && isError(b);
  return signalEq(a, b);
}

export function showValue(v: ValueJson): string {
  if (v.t === "bool") return v.v ? "#t" : "#f";
  if (v.t === "pair") return `(${v.v[0]},${v.v[1]})`;
  return String(v.v);
}

export function showCell(c: CellJson): string {
  return c === null ? "·" : showValue(c);
}

/** Deep copy through JSON so editor state never aliases API payloads. */
export function cloneJson<T>(x: T): T {
  return JSON.parse(JSON.stringify(x)) as T;
}
