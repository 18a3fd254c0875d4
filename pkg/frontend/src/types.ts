/** JSON wire types mirrored from the synthesis service.
 *
 * value:  {"t":"int","v":n} | {"t":"bool","v":b} | {"t":"pair","v":[x,y]}
 * cell:   value | null (null = no event this step; behaviors never use it)
 * trace:  {"length":L,"ports":{name:signal}}
 */

export type ValueJson =
  | { t: "int"; v: number }
  | { t: "bool"; v: boolean }
  | { t: "pair"; v: [number, number] };

export type CellJson = ValueJson | null;

export interface EventSignalJson {
  kind: "events";
  cells: CellJson[];
}

export interface BehaviorSignalJson {
  kind: "behavior";
  init: ValueJson;
  cells: ValueJson[];
}

export type SignalJson = EventSignalJson | BehaviorSignalJson;

export interface TraceJson {
  length: number;
  ports: Record<string, SignalJson>;
}

export interface PortJson {
  name: string;
  kind: "events" | "behavior";
  domain: ValueJson[];
}

/** Candidate outputs may be the poisoned error marker instead of a signal. */
export type OutputJson = SignalJson | { error: true };

export interface TimeRefJson {
  at?: number;
  var?: string;
  off?: number;
}

export type ClauseJson =
  | { c: "mutex"; ports: string[] }
  | { c: "alternate"; a_port: string; b_port: string }
  | { c: "present"; port: string; when: TimeRefJson }
  | { c: "valuecmp"; port: string; when: TimeRefJson; op: CmpOp; value: ValueJson }
  | { c: "not"; body: ClauseJson }
  | { c: "and"; clauses: ClauseJson[] }
  | { c: "or"; clauses: ClauseJson[] }
  | { c: "implies"; antecedent: ClauseJson; consequent: ClauseJson }
  | { c: "forall" | "exists"; var: string; body: ClauseJson; lo?: number; hi?: number };

export type CmpOp = "eq" | "ne" | "le" | "lt";

export type ItemJson =
  | { item: "io_pair"; trace: TraceJson; expected: SignalJson }
  | {
      item: "input_assumption" | "output_constraint" | "relational_constraint";
      clause: ClauseJson;
      note?: string;
    };

export interface InsnJson {
  op: string;
  args: number[];
  const?: unknown;
  pred?: string;
}

export interface ProgramJson {
  inputs: { name: string; kind: string }[];
  insns: InsnJson[];
}

/** POST /sessions response. */
export interface SessionInfo {
  id: string;
  state: "new";
  length: number;
  max_insns: number;
  seed: number;
  out_kind: string;
  ports: PortJson[];
  benchmark?: string;
}

/** "candidates" transcript event embedded in a pending snapshot. */
export interface CandidatesEvent {
  event: "candidates";
  program_a: ProgramJson;
  program_b: ProgramJson;
  input: TraceJson;
  out_a: OutputJson;
  out_b: OutputJson;
}

export interface SnapshotPending {
  id: string;
  state: "pending";
  candidates: CandidatesEvent;
  pretty_a?: string;
  pretty_b?: string;
}

export interface SnapshotDone {
  id: string;
  state: "done";
  status: string;
  program: ProgramJson | null;
  interactions: number;
  pretty?: string;
}

export interface SnapshotIdle {
  id: string;
  state: "idle";
  interactions: number;
}

export type Snapshot = SnapshotPending | SnapshotDone | SnapshotIdle;

export type AnswerBody =
  | { kind: "accept_a" | "accept_b" | "abort" }
  | { kind: "correct"; output: SignalJson }
  | { kind: "items"; items: ItemJson[] };

export interface TranscriptResponse {
  id: string;
  state: string;
  transcript: Record<string, unknown>[];
}

export interface BenchmarkInfo {
  name: string;
  description: string;
  ports: PortJson[];
  out_kind: string;
  length: number;
  max_insns: number;
}
