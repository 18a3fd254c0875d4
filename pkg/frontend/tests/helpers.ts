import type { PortJson, SignalJson, TraceJson, ValueJson } from "../src/types.js";

/** Small deterministic PRNG so trace fixtures are reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function pick<T>(rng: () => number, xs: readonly T[]): T {
  const i = Math.floor(rng() * xs.length);
  return xs[Math.min(i, xs.length - 1)]!;
}

export const INT_DOMAIN: ValueJson[] = [
  { t: "int", v: -1 },
  { t: "int", v: 0 },
  { t: "int", v: 1 },
];

export const BOOL_DOMAIN: ValueJson[] = [
  { t: "bool", v: false },
  { t: "bool", v: true },
];

export const PAIR_DOMAIN: ValueJson[] = [
  { t: "pair", v: [1, 1] },
  { t: "pair", v: [2, 2] },
];

const DOMAINS = [INT_DOMAIN, BOOL_DOMAIN, PAIR_DOMAIN];

export function randomPorts(rng: () => number, count: number): PortJson[] {
  return Array.from({ length: count }, (_, i) => ({
    name: `p${i}`,
    kind: rng() < 0.3 ? ("behavior" as const) : ("events" as const),
    domain: pick(rng, DOMAINS),
  }));
}

export function randomSignal(rng: () => number, port: PortJson, length: number): SignalJson {
  if (port.kind === "behavior") {
    return {
      kind: "behavior",
      init: pick(rng, port.domain),
      cells: Array.from({ length }, () => pick(rng, port.domain)),
    };
  }
  return {
    kind: "events",
    cells: Array.from({ length }, () =>
      rng() < 0.4 ? null : pick(rng, port.domain),
    ),
  };
}

export function randomTrace(rng: () => number, ports: PortJson[], length: number): TraceJson {
  const rec: Record<string, SignalJson> = {};
  for (const p of ports) rec[p.name] = randomSignal(rng, p, length);
  return { length, ports: rec };
}
