/** Marble-lane editor model: one lane per port, one cell per timestep.
 *
 * Event lanes show a value chip where an occurrence sits and a gap (null)
 * elsewhere. Behavior lanes are a continuous ribbon: an init value plus one
 * value per step, never a gap. Edits only ever produce cells drawn from the
 * port's declared domain, so any lane state serializes to trace JSON the
 * service accepts.
 */
import type { CellJson, PortJson, SignalJson, TraceJson, ValueJson } from "./types.js";
import { cloneJson, showValue, valueEq } from "./values.js";

export class LaneEditError extends Error {}

export interface MarbleLane {
  port: string;
  kind: "events" | "behavior";
  domain: ValueJson[];
  editable: boolean;
  /** Behavior lanes only: value the ribbon holds before step 0. */
  init: ValueJson | null;
  cells: CellJson[];
}

function quietCells(port: PortJson, length: number): CellJson[] {
  if (port.kind === "behavior") {
    const v = port.domain[0];
    if (v === undefined) throw new LaneEditError(`port ${port.name} has an empty domain`);
    return Array.from({ length }, () => cloneJson(v));
  }
  return Array.from({ length }, () => null);
}

export function laneFromPort(port: PortJson, length: number, editable = true): MarbleLane {
  const first = port.domain[0];
  if (first === undefined) throw new LaneEditError(`port ${port.name} has an empty domain`);
  return {
    port: port.name,
    kind: port.kind,
    domain: cloneJson(port.domain),
    editable,
    init: port.kind === "behavior" ? cloneJson(first) : null,
    cells: quietCells(port, length),
  };
}

export function lanesFromPorts(ports: PortJson[], length: number, editable = true): MarbleLane[] {
  return ports.map((p) => laneFromPort(p, length, editable));
}

/** Render an existing signal (e.g. a distinguishing input) into a lane. */
export function laneFromSignal(
  name: string,
  sig: SignalJson,
  domain: ValueJson[] = [],
  editable = false,
): MarbleLane {
  if (sig.kind === "behavior") {
    return {
      port: name,
      kind: "behavior",
      domain: cloneJson(domain),
      editable,
      init: cloneJson(sig.init),
      cells: sig.cells.map((c) => cloneJson(c)),
    };
  }
  return {
    port: name,
    kind: "events",
    domain: cloneJson(domain),
    editable,
    init: null,
    cells: sig.cells.map((c) => (c === null ? null : cloneJson(c))),
  };
}

export function lanesFromTrace(trace: TraceJson, ports: PortJson[] = [], editable = true): MarbleLane[] {
  const domains = new Map(ports.map((p) => [p.name, p.domain]));
  return Object.keys(trace.ports)
    .sort()
    .map((name) => {
      const sig = trace.ports[name]!;
      return laneFromSignal(name, sig, domains.get(name) ?? [], editable);
    });
}

export function inDomain(v: ValueJson, domain: ValueJson[]): boolean {
  return domain.length === 0 || domain.some((d) => valueEq(d, v));
}

function checkEdit(lane: MarbleLane, t: number): void {
  if (!lane.editable) throw new LaneEditError(`lane ${lane.port} is read-only`);
  if (!Number.isInteger(t) || t < 0 || t >= lane.cells.length) {
    throw new LaneEditError(`timestep ${t} outside 0..${lane.cells.length - 1}`);
  }
}

/** Place a value (or, on event lanes, a gap) at step t. Returns a new lane. */
export function setCell(lane: MarbleLane, t: number, cell: CellJson): MarbleLane {
  checkEdit(lane, t);
  if (cell === null) {
    if (lane.kind === "behavior") {
      throw new LaneEditError(`behavior lane ${lane.port} cannot hold a gap`);
    }
  } else if (!inDomain(cell, lane.domain)) {
    throw new LaneEditError(
      `${showValue(cell)} is outside the ${lane.port} domain`,
    );
  }
  const cells = lane.cells.slice();
  cells[t] = cell === null ? null : cloneJson(cell);
  return { ...lane, cells };
}

export function setInit(lane: MarbleLane, v: ValueJson): MarbleLane {
  if (!lane.editable) throw new LaneEditError(`lane ${lane.port} is read-only`);
  if (lane.kind !== "behavior") {
    throw new LaneEditError(`event lane ${lane.port} has no init value`);
  }
  if (!inDomain(v, lane.domain)) {
    throw new LaneEditError(`${showValue(v)} is outside the ${lane.port} domain`);
  }
  return { ...lane, init: cloneJson(v) };
}

/** Clear the lane: events drop every occurrence, behaviors return to quiet. */
export function clearLane(lane: MarbleLane): MarbleLane {
  if (!lane.editable) throw new LaneEditError(`lane ${lane.port} is read-only`);
  if (lane.kind === "behavior") {
    const v = lane.domain[0] ?? lane.init;
    if (!v) throw new LaneEditError(`lane ${lane.port} has no quiet value`);
    return {
      ...lane,
      init: cloneJson(v),
      cells: lane.cells.map(() => cloneJson(v)),
    };
  }
  return { ...lane, cells: lane.cells.map(() => null) };
}

/** Step to the next choice at t: gap (events only), then each domain value. */
export function cycleCell(lane: MarbleLane, t: number): MarbleLane {
  checkEdit(lane, t);
  const choices: CellJson[] =
    lane.kind === "events" ? [null, ...lane.domain] : [...lane.domain];
  const cur = lane.cells[t] ?? null;
  const idx = choices.findIndex((c) =>
    c === null || cur === null ? c === cur : valueEq(c, cur),
  );
  const next = choices[(idx + 1) % choices.length] ?? null;
  return setCell(lane, t, next);
}

export function laneToSignal(lane: MarbleLane): SignalJson {
  if (lane.kind === "behavior") {
    if (lane.init === null) {
      throw new LaneEditError(`behavior lane ${lane.port} is missing its init value`);
    }
    const cells: ValueJson[] = lane.cells.map((c, t) => {
      if (c === null) {
        throw new LaneEditError(`behavior lane ${lane.port} has a gap at step ${t}`);
      }
      return cloneJson(c);
    });
    return { kind: "behavior", init: cloneJson(lane.init), cells };
  }
  return {
    kind: "events",
    cells: lane.cells.map((c) => (c === null ? null : cloneJson(c))),
  };
}

export function lanesToTrace(lanes: MarbleLane[]): TraceJson {
  const lengths = new Set(lanes.map((l) => l.cells.length));
  if (lengths.size > 1) throw new LaneEditError("lanes disagree on trace length");
  const length = lanes[0]?.cells.length ?? 0;
  const ports: Record<string, SignalJson> = {};
  for (const lane of lanes) ports[lane.port] = laneToSignal(lane);
  return { length, ports };
}
