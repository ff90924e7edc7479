/**
 * Typed client for the pooldesign HTTP service.
 *
 * The UI performs no pooling math of its own; every figure it renders was
 * produced by one of these endpoints.
 */

export interface MethodInfo {
  method: string;
  adaptivity: string;
  fixed_differentiate: number | null;
}

export interface RoundDoc {
  round_index: number;
  pools: number[][];
}

export interface DesignDoc {
  schema_version: string;
  method: string;
  samples: number;
  differentiate: number;
  adaptivity: string;
  params: Record<string, unknown>;
  rounds: RoundDoc[];
}

export interface ComparisonRow {
  method: string;
  tests_worst: number;
  tests_per_sample: number;
  steps_worst: number;
  max_group_size: number;
  exact: boolean;
  violations: string[];
}

export interface Comparison {
  samples: number;
  differentiate: number;
  rows: ComparisonRow[];
  infeasible: { method: string; reason: string }[];
}

export interface Plan {
  samples: number;
  prevalence: number;
  tolerance: number;
  advisable: boolean;
  // the planning fields are null when the plan is not advisable
  differentiate: number | null;
  splits: number | null;
  part_samples: number | null;
  error_prob: number | null;
  note: string | null;
  comparison?: Comparison;
}

export interface HistoryEntry {
  round_index: number;
  outcomes: boolean[];
}

export type SessionStatus = "awaiting_results" | "finished" | "failed";

export interface SessionDoc {
  id: string;
  schema_version: string;
  design: DesignDoc;
  history: HistoryEntry[];
  status: SessionStatus;
  resolved_positives: number[];
  failure_reason: string | null;
  pending_round: RoundDoc | null;
  version: number;
}

export interface DesignRequest {
  method: string;
  samples: number;
  differentiate: number;
  dims?: number;
}

export interface RecommendRequest {
  samples: number;
  prevalence: number;
  tolerance: number;
}

/** Error response from the service, carried with its HTTP status. */
export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiFailure";
  }
}

/** The fetch itself failed; the service is down or unreachable. */
export class ServiceUnreachable extends Error {
  constructor(readonly reason: unknown) {
    super("service unreachable");
    this.name = "ServiceUnreachable";
  }
}

export const describeError = (err: unknown): string => {
  if (err instanceof ServiceUnreachable) {
    return "pooling service unreachable; your inputs are preserved. Start the service and try again.";
  }
  if (err instanceof ApiFailure) return `${err.code}: ${err.message}`;
  return String(err);
};

/** Minimal response surface so tests can stub fetch with plain objects. */
export interface FetchResponse {
  ok: boolean;
  status: number;
  text(): Promise<string>;
}

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponse>;

interface RawReply {
  ok: boolean;
  status: number;
  text: string;
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async send(method: string, path: string, body?: unknown): Promise<RawReply> {
    let response: FetchResponse;
    try {
      response = await this.fetchImpl(`${this.base}${path}`, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ServiceUnreachable(err);
    }
    return { ok: response.ok, status: response.status, text: await response.text() };
  }

  private parse<T>(reply: RawReply): T {
    let payload: unknown = null;
    try {
      payload = JSON.parse(reply.text);
    } catch {
      payload = null;
    }
    if (!reply.ok) {
      const error = (payload as { error?: { code?: string; message?: string } } | null)?.error;
      throw new ApiFailure(reply.status, error?.code ?? "internal", error?.message ?? `HTTP ${reply.status}`);
    }
    return payload as T;
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    return this.parse<T>(await this.send(method, path, body));
  }

  health(): Promise<{ status: string; version: string }> {
    return this.call("GET", "/api/health");
  }

  async methods(): Promise<MethodInfo[]> {
    const doc = await this.call<{ methods: MethodInfo[] }>("GET", "/api/methods");
    return doc.methods;
  }

  design(request: DesignRequest): Promise<DesignDoc> {
    return this.call("POST", "/api/design", request);
  }

  /** Design plus the exact response text, for downloads that keep server bytes. */
  async designDocument(request: DesignRequest): Promise<{ doc: DesignDoc; text: string }> {
    const reply = await this.send("POST", "/api/design", request);
    return { doc: this.parse<DesignDoc>(reply), text: reply.text };
  }

  recommend(request: RecommendRequest): Promise<Plan> {
    return this.call("POST", "/api/recommend", request);
  }

  createSession(design: DesignDoc): Promise<SessionDoc> {
    return this.call("POST", "/api/session", { design });
  }

  getSession(id: string): Promise<SessionDoc> {
    return this.call("GET", `/api/session/${id}`);
  }

  submitResults(id: string, results: boolean[], version: number): Promise<SessionDoc> {
    return this.call("POST", `/api/session/${id}/results`, { results, version });
  }
}
