/** Session console state. Every field mirrors an API response; the client
 * never synthesizes or simulates programs itself.
 */
import { ApiClient, ApiError, type NewSessionBody } from "./api.js";
import { firstDiff } from "./diff.js";
import { laneFromSignal, lanesToTrace, type MarbleLane } from "./marble.js";
import type {
  AnswerBody,
  ItemJson,
  PortJson,
  SessionInfo,
  SignalJson,
  Snapshot,
  SnapshotPending,
  TraceJson,
} from "./types.js";
import { isError } from "./values.js";

export interface PendingView {
  prettyA: string;
  prettyB: string;
  inputLanes: MarbleLane[];
  outLaneA: MarbleLane | null; // null when that candidate's output is the error marker
  outLaneB: MarbleLane | null;
  errorA: boolean;
  errorB: boolean;
  /** First timestep where the two outputs disagree; null means identical. */
  diffAt: number | null;
  inputTrace: TraceJson;
}

export class SessionView {
  info: SessionInfo | null = null;
  snap: Snapshot | null = null;
  specItems: ItemJson[] = [];
  lastError: ApiError | null = null;
  /** Which refinement affordance each user action used. */
  actionLog: string[] = [];

  constructor(readonly api: ApiClient) {}

  get id(): string | null {
    return this.info?.id ?? null;
  }

  get ports(): PortJson[] {
    return this.info?.ports ?? [];
  }

  get length(): number {
    return this.info?.length ?? 0;
  }

  get status(): string {
    if (!this.info) return "no-session";
    if (!this.snap) return "new";
    if (this.snap.state === "done") return `done:${this.snap.status}`;
    return this.snap.state;
  }

  get canAnswer(): boolean {
    return this.snap?.state === "pending";
  }

  private async guard<T>(op: () => Promise<T>): Promise<T | null> {
    this.lastError = null;
    try {
      return await op();
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = err;
        return null;
      }
      throw err;
    }
  }

  private async refreshSpec(): Promise<void> {
    if (!this.info) return;
    const doc = await this.api.transcript(this.info.id);
    const items: ItemJson[] = [];
    for (const ev of doc.transcript) {
      if (ev.event === "session" && Array.isArray(ev.spec)) {
        items.push(...(ev.spec as ItemJson[]));
      } else if (ev.event === "answer" && Array.isArray(ev.items)) {
        items.push(...(ev.items as ItemJson[]));
      }
    }
    this.specItems = items;
  }

  async start(body: NewSessionBody): Promise<SessionInfo | null> {
    const info = await this.guard(() => this.api.createSession(body));
    if (info) {
      this.info = info;
      this.snap = null;
      this.specItems = [];
      await this.refreshSpec();
    }
    return info;
  }

  /** Ask the service to synthesize until a distinguishing pair is pending. */
  async fetchCandidates(): Promise<Snapshot | null> {
    if (!this.info) return null;
    const snap = await this.guard(() => this.api.candidates(this.info!.id));
    if (snap) this.snap = snap;
    return snap;
  }

  private async submitItems(items: ItemJson[], used: string): Promise<boolean> {
    if (!this.info) return false;
    let ok: unknown;
    if (this.canAnswer) {
      ok = await this.guard(() => this.api.answer(this.info!.id, { kind: "items", items }));
      if (ok) {
        this.snap = ok as Snapshot;
        await this.fetchCandidates();
      }
    } else {
      ok = await this.guard(() => this.api.postSpec(this.info!.id, items, this.info!.length));
    }
    if (ok) {
      this.actionLog.push(used);
      await this.refreshSpec();
    }
    return ok !== null;
  }

  /** "Alter the trace": submit an edited trace with its expected output. */
  async addIoPair(inputLanes: MarbleLane[], expected: SignalJson): Promise<boolean> {
    const trace = lanesToTrace(inputLanes);
    const item: ItemJson = { item: "io_pair", trace, expected };
    return this.submitItems([item], "alter-trace");
  }

  /** "Add an invariant": submit a clause item from the builder panel. */
  async addInvariant(item: ItemJson): Promise<boolean> {
    return this.submitItems([item], "add-invariant");
  }

  /** Answer the pending pair; the view refetches so state moves forward. */
  async choose(body: AnswerBody): Promise<boolean> {
    if (!this.info || !this.canAnswer) return false;
    const snap = await this.guard(() => this.api.answer(this.info!.id, body));
    if (!snap) return false;
    this.snap = snap;
    this.actionLog.push(`answer:${body.kind}`);
    await this.refreshSpec();
    if (this.snap.state !== "done") await this.fetchCandidates();
    return true;
  }

  pending(): PendingView | null {
    if (this.snap?.state !== "pending") return null;
    const snap = this.snap as SnapshotPending;
    const cand = snap.candidates;
    const domains = new Map(this.ports.map((p) => [p.name, p.domain]));
    const inputLanes = Object.keys(cand.input.ports)
      .sort()
      .map((name) =>
        laneFromSignal(name, cand.input.ports[name]!, domains.get(name) ?? [], false),
      );
    const outA = isError(cand.out_a) ? null : laneFromSignal("out A", cand.out_a, [], false);
    const outB = isError(cand.out_b) ? null : laneFromSignal("out B", cand.out_b, [], false);
    return {
      prettyA: snap.pretty_a ?? "",
      prettyB: snap.pretty_b ?? "",
      inputLanes,
      outLaneA: outA,
      outLaneB: outB,
      errorA: isError(cand.out_a),
      errorB: isError(cand.out_b),
      diffAt: firstDiff(cand.out_a, cand.out_b),
      inputTrace: cand.input,
    };
  }
}
