/**
 * Fetch stub that replays HTTP exchanges recorded from a live pooldesign
 * service (scripts/record_fixtures.py).  Requests are matched on canonical
 * JSON bodies; session scenarios advance through their recorded submissions,
 * so the fake stays a pure transcript player and never invents numbers.
 */

import type { FetchLike, FetchResponse } from "../src/api.js";
import fixturesJson from "./fixtures/http.json";

export interface Recorded {
  status: number;
  response: unknown;
  request?: unknown;
}

export interface SessionScenario {
  design: unknown;
  create: Recorded;
  submits: Recorded[];
  stale: Recorded | null;
}

export interface Fixtures {
  health: Recorded;
  methods: Recorded;
  recommend: Recorded[];
  design: Recorded[];
  sessions: SessionScenario[];
}

export const fixtures = fixturesJson as unknown as Fixtures;

const sortKeys = (value: unknown): unknown => {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([key, inner]) => [key, sortKeys(inner)]);
    return Object.fromEntries(entries);
  }
  return value;
};

export const canon = (value: unknown): string => JSON.stringify(sortKeys(value));

export const fixtureRows = (index: number) =>
  (fixtures.recommend[index].response as {
    comparison: {
      samples: number;
      differentiate: number;
      rows: {
        method: string;
        tests_worst: number;
        tests_per_sample: number;
        steps_worst: number;
        max_group_size: number;
        exact: boolean;
        violations: string[];
      }[];
      infeasible: { method: string; reason: string }[];
    };
  }).comparison;

interface LiveSession {
  scenario: SessionScenario;
  cursor: number;
}

interface Hold {
  key: string;
  gate: Promise<void>;
  open: () => void;
}

export class FakeService {
  /** When true every request fails at the transport, as if the service died. */
  down = false;
  readonly calls: { method: string; path: string; body: unknown }[] = [];
  readonly fetch: FetchLike;

  private readonly sessions = new Map<string, LiveSession>();
  private readonly holds: Hold[] = [];

  constructor() {
    this.fetch = (input, init) => this.handle(String(input), init);
  }

  /** The next request matching "METHOD /path" stalls until the returned release fires. */
  hold(key: string): () => void {
    let open!: () => void;
    const gate = new Promise<void>((resolve) => {
      open = resolve;
    });
    this.holds.push({ key, gate, open });
    return open;
  }

  private async handle(
    url: string,
    init?: { method?: string; body?: string },
  ): Promise<FetchResponse> {
    if (this.down) throw new TypeError("fetch failed");
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const method = init?.method ?? "GET";
    const body: unknown = init?.body === undefined ? undefined : JSON.parse(init.body);
    this.calls.push({ method, path, body });
    const index = this.holds.findIndex((hold) => hold.key === `${method} ${path}`);
    if (index >= 0) {
      const [hold] = this.holds.splice(index, 1);
      await hold.gate;
    }
    return this.route(method, path, body);
  }

  private respond(recorded: Recorded): FetchResponse {
    return {
      ok: recorded.status >= 200 && recorded.status < 300,
      status: recorded.status,
      text: async () => JSON.stringify(recorded.response),
    };
  }

  private match(pool: Recorded[], body: unknown, what: string): Recorded {
    const key = canon(body);
    for (const recorded of pool) {
      if (canon(recorded.request) === key) return recorded;
    }
    throw new Error(`no recorded ${what} fixture for ${key}`);
  }

  private currentDoc(live: LiveSession): Record<string, unknown> {
    const recorded =
      live.cursor === 0 ? live.scenario.create : live.scenario.submits[live.cursor - 1];
    return recorded.response as Record<string, unknown>;
  }

  private route(method: string, path: string, body: unknown): FetchResponse {
    if (method === "GET" && path === "/api/health") return this.respond(fixtures.health);
    if (method === "GET" && path === "/api/methods") return this.respond(fixtures.methods);
    if (method === "POST" && path === "/api/recommend") {
      return this.respond(this.match(fixtures.recommend, body, "recommend"));
    }
    if (method === "POST" && path === "/api/design") {
      return this.respond(this.match(fixtures.design, body, "design"));
    }
    if (method === "POST" && path === "/api/session") {
      const design = canon((body as { design: unknown }).design);
      const scenario = fixtures.sessions.find((entry) => canon(entry.design) === design);
      if (scenario === undefined) throw new Error(`no recorded session for design ${design}`);
      const id = (scenario.create.response as { id: string }).id;
      this.sessions.set(id, { scenario, cursor: 0 });
      return this.respond(scenario.create);
    }
    const sessionGet = /^\/api\/session\/([A-Za-z0-9]+)$/.exec(path);
    if (method === "GET" && sessionGet !== null) {
      const live = this.sessions.get(sessionGet[1]);
      if (live === undefined) throw new Error(`no live session ${sessionGet[1]}`);
      return this.respond({ status: 200, response: this.currentDoc(live) });
    }
    const sessionPost = /^\/api\/session\/([A-Za-z0-9]+)\/results$/.exec(path);
    if (method === "POST" && sessionPost !== null) {
      return this.submitTo(sessionPost[1], body);
    }
    throw new Error(`no route for ${method} ${path}`);
  }

  private submitTo(id: string, body: unknown): FetchResponse {
    const live = this.sessions.get(id);
    if (live === undefined) throw new Error(`no live session ${id}`);
    const seen = (body as { version?: number }).version;
    const current = this.currentDoc(live)["version"] as number;
    if (seen !== undefined && seen !== current) {
      const stale = live.scenario.stale;
      if (stale !== null && canon(stale.request) === canon(body)) return this.respond(stale);
      throw new Error(`unexpected stale submit at version ${current}: ${canon(body)}`);
    }
    const expected = live.scenario.submits[live.cursor];
    if (expected === undefined) throw new Error(`no recorded submit #${live.cursor} for ${id}`);
    if (canon(expected.request) !== canon(body)) {
      throw new Error(`submit ${canon(body)} differs from recorded ${canon(expected.request)}`);
    }
    live.cursor += 1;
    return this.respond(expected);
  }
}
