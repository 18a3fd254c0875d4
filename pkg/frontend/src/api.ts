/** Thin typed client for the synthesis session service. */
import type {
  AnswerBody,
  BenchmarkInfo,
  ItemJson,
  SessionInfo,
  Snapshot,
  TranscriptResponse,
} from "./types.js";

/** Non-2xx response; `detail` is the service's message, verbatim. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export interface NewSessionBody {
  benchmark?: string;
  ports?: unknown[];
  out_kind?: "events" | "behavior";
  length?: number;
  max_insns?: number;
  seed?: number;
  bound?: number;
  backend?: string;
  step_timeout?: number;
  max_interactions?: number;
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly base: string,
    private readonly fetchImpl: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetchImpl(this.base + path, init);
    const text = await resp.text();
    let doc: unknown = null;
    try {
      doc = text ? JSON.parse(text) : null;
    } catch {
      doc = null;
    }
    if (!resp.ok) {
      const detail =
        doc && typeof doc === "object" && "detail" in doc
          ? String((doc as { detail: unknown }).detail)
          : text || resp.statusText;
      throw new ApiError(resp.status, detail);
    }
    return doc as T;
  }

  benchmarks(): Promise<BenchmarkInfo[]> {
    return this.request("GET", "/benchmarks");
  }

  createSession(body: NewSessionBody): Promise<SessionInfo> {
    return this.request("POST", "/sessions", body);
  }

  /** Pre-session only: extend the specification before synthesis starts. */
  postSpec(id: string, items: ItemJson[], length?: number): Promise<{ id: string; items: number }> {
    const body: { items: ItemJson[]; length?: number } = { items };
    if (length !== undefined) body.length = length;
    return this.request("POST", `/sessions/${id}/spec`, body);
  }

  /** Runs synthesis server-side until a pair is pending or the loop ends. */
  candidates(id: string): Promise<Snapshot> {
    return this.request("GET", `/sessions/${id}/candidates`);
  }

  answer(id: string, body: AnswerBody): Promise<Snapshot> {
    return this.request("POST", `/sessions/${id}/answer`, body);
  }

  transcript(id: string): Promise<TranscriptResponse> {
    return this.request("GET", `/sessions/${id}/transcript`);
  }
}
