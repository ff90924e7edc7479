/**
 * Adaptive session runner.
 *
 * Starts a server-hosted session from a design, renders each pending round's
 * pools as sample-index checklists, and submits the entered outcomes.  The
 * rendered state is derived entirely from the server's session document, so
 * reloading and resuming by id reproduces the identical view.
 */

import {
  ApiClient,
  ApiFailure,
  ServiceUnreachable,
  describeError,
  type DesignDoc,
  type SessionDoc,
} from "./api.js";
import { clear, el } from "./dom.js";
import { TaskGroup } from "./tasks.js";

export type ClipboardWrite = (text: string) => Promise<void>;

export interface SessionOptions {
  clipboard?: ClipboardWrite;
}

const defaultClipboard: ClipboardWrite = (text) =>
  navigator.clipboard ? navigator.clipboard.writeText(text) : Promise.resolve();

const GUIDANCE: Record<string, string> = {
  exceeds_differentiate:
    "More positives than this design can resolve; retest the remaining candidates individually " +
    "or rebuild with a higher capacity.",
  contradictory_results:
    "The entered results contradict the pooling layout; re-check each pool against the plate.",
};

const guidanceFor = (reason: string | null): string =>
  (reason !== null && GUIDANCE[reason]) || "The session cannot continue; start a new one.";

type Notice = { kind: "warn" | "error"; text: string };

export class SessionRunnerView {
  readonly root: HTMLElement;
  readonly tasks = new TaskGroup();
  onSessionChange?: (id: string | null) => void;

  private session: SessionDoc | null = null;
  private entries: (boolean | null)[] = [];
  private submitted = 0;
  private notice: Notice | null = null;

  private readonly clipboard: ClipboardWrite;
  private readonly methodSelect: HTMLSelectElement;
  private readonly samplesInput: HTMLInputElement;
  private readonly differentiateInput: HTMLInputElement;
  private readonly dimsField: HTMLElement;
  private readonly dimsInput: HTMLInputElement;
  private readonly formBanner: HTMLElement;
  private readonly panel: HTMLElement;

  constructor(
    private readonly client: ApiClient,
    options: SessionOptions = {},
  ) {
    this.clipboard = options.clipboard ?? defaultClipboard;

    this.methodSelect = el("select", { data: { role: "method" } });
    this.methodSelect.addEventListener("change", () => this.updateDimsVisibility());
    this.samplesInput = el("input", {
      attrs: { type: "number", value: "36", min: "1", step: "1" },
      data: { role: "samples" },
    });
    this.differentiateInput = el("input", {
      attrs: { type: "number", value: "1", min: "1", step: "1" },
      data: { role: "differentiate" },
    });
    this.dimsInput = el("input", {
      attrs: { type: "number", value: "3", min: "2", step: "1" },
      data: { role: "dims" },
    });
    this.dimsField = el("label", { className: "field hidden" }, [
      el("span", { text: "dims" }),
      this.dimsInput,
    ]);

    const startButton = el("button", {
      className: "primary",
      text: "start session",
      attrs: { type: "button" },
      data: { role: "start" },
    });
    startButton.addEventListener("click", () => this.start());

    this.formBanner = el("div", { className: "banner hidden", data: { role: "form-banner" } });
    this.panel = el("section", { className: "session-panel", data: { role: "session-panel" } });

    this.root = el("section", { className: "session" }, [
      el("form", { className: "inputs", attrs: { autocomplete: "off" } }, [
        el("label", { className: "field" }, [el("span", { text: "method" }), this.methodSelect]),
        el("label", { className: "field" }, [el("span", { text: "samples (S)" }), this.samplesInput]),
        el("label", { className: "field" }, [
          el("span", { text: "capacity (D)" }),
          this.differentiateInput,
        ]),
        this.dimsField,
        startButton,
      ]),
      this.formBanner,
      this.panel,
    ]);

    this.renderSession();
    this.tasks.run(() => this.loadMethods());
  }

  get submissionCount(): number {
    return this.submitted;
  }

  get sessionId(): string | null {
    return this.session?.id ?? null;
  }

  private async loadMethods(): Promise<void> {
    try {
      const entries = await this.client.methods();
      clear(this.methodSelect);
      for (const entry of entries) {
        const fixed =
          entry.fixed_differentiate === null ? "" : `, capacity ${entry.fixed_differentiate}`;
        this.methodSelect.append(
          el("option", {
            text: `${entry.method} (${entry.adaptivity}${fixed})`,
            attrs: { value: entry.method },
          }),
        );
      }
      this.updateDimsVisibility();
    } catch (err) {
      this.showFormBanner(describeError(err));
    }
  }

  private updateDimsVisibility(): void {
    this.dimsField.classList.toggle("hidden", this.methodSelect.value !== "multidim");
  }

  private showFormBanner(text: string): void {
    this.formBanner.className = "banner error";
    this.formBanner.textContent = text;
  }

  private hideFormBanner(): void {
    this.formBanner.className = "banner hidden";
    this.formBanner.textContent = "";
  }

  start(): void {
    this.tasks.run(async () => {
      const method = this.methodSelect.value;
      const samples = Number(this.samplesInput.value);
      const differentiate = Number(this.differentiateInput.value);
      if (method === "" || !Number.isInteger(samples) || !Number.isInteger(differentiate)) {
        this.showFormBanner("pick a method and give integer samples and capacity");
        return;
      }
      const request: { method: string; samples: number; differentiate: number; dims?: number } = {
        method,
        samples,
        differentiate,
      };
      if (method === "multidim") request.dims = Number(this.dimsInput.value);
      try {
        const design = await this.client.design(request);
        await this.open(design);
      } catch (err) {
        this.showFormBanner(describeError(err));
      }
    });
  }

  /** Entry point for the explorer's "run a session with this design" handoff. */
  startFromDesign(design: DesignDoc): void {
    this.tasks.run(async () => {
      try {
        await this.open(design);
      } catch (err) {
        this.showFormBanner(describeError(err));
      }
    });
  }

  resume(id: string): void {
    this.tasks.run(async () => {
      try {
        this.adopt(await this.client.getSession(id));
        this.hideFormBanner();
      } catch (err) {
        this.showFormBanner(describeError(err));
      }
      this.renderSession();
    });
  }

  private async open(design: DesignDoc): Promise<void> {
    this.adopt(await this.client.createSession(design));
    this.submitted = 0;
    this.hideFormBanner();
    this.renderSession();
  }

  private adopt(doc: SessionDoc): void {
    this.session = doc;
    this.entries = doc.pending_round === null ? [] : doc.pending_round.pools.map(() => null);
    this.notice = null;
    this.onSessionChange?.(doc.id);
  }

  private submit(): void {
    this.tasks.run(async () => {
      const session = this.session;
      if (session === null || session.pending_round === null) return;
      if (this.entries.some((entry) => entry === null)) return;
      const results = this.entries.map((entry) => entry === true);
      try {
        const doc = await this.client.submitResults(session.id, results, session.version);
        this.submitted += 1;
        this.adopt(doc);
      } catch (err) {
        if (err instanceof ApiFailure && err.message.startsWith("stale session state")) {
          // another tab won the write; surface the version gap and re-sync
          this.adopt(await this.client.getSession(session.id));
          this.notice = {
            kind: "warn",
            text: `${err.message}. Another writer advanced this session; the view now shows the latest server round.`,
          };
        } else if (err instanceof ServiceUnreachable) {
          this.notice = {
            kind: "error",
            text: "pooling service unreachable; nothing was submitted and your entries are preserved.",
          };
        } else {
          this.notice = { kind: "error", text: describeError(err) };
        }
      }
      this.renderSession();
    });
  }

  private renderSession(): void {
    clear(this.panel);
    const session = this.session;
    if (session === null) {
      this.panel.append(
        el("p", { className: "placeholder", text: "no active session; start one above" }),
      );
      return;
    }

    this.panel.append(
      el("header", { className: "session-head" }, [
        el("h2", { text: `session ${session.id}` }),
        el("span", { className: `status ${session.status}`, text: session.status, data: { role: "status" } }),
        el("span", {
          className: "version",
          text: `server version ${session.version}`,
          data: { role: "version" },
        }),
      ]),
      el("p", {
        className: "design-summary",
        text:
          `${session.design.method}, ${session.design.samples} samples, ` +
          `capacity ${session.design.differentiate}`,
        data: { role: "design-summary" },
      }),
    );

    if (this.notice !== null) {
      this.panel.append(
        el("div", { className: `banner ${this.notice.kind}`, text: this.notice.text, data: { role: "notice" } }),
      );
    }

    this.renderGrid(session);
    this.renderTimeline(session);
    this.renderResult(session);
    this.renderPending(session);
  }

  /** Matrix designs get a plate view: the design's row pools, one per line. */
  private renderGrid(session: SessionDoc): void {
    const design = session.design;
    if (design.method !== "matrix") return;
    const gridRows = design.params["grid_rows"];
    const pools = design.rounds[0]?.pools ?? [];
    if (typeof gridRows !== "number" || gridRows > pools.length) return;
    const body = el("tbody");
    for (const pool of pools.slice(0, gridRows)) {
      body.append(el("tr", {}, pool.map((sample) => el("td", { text: String(sample) }))));
    }
    this.panel.append(
      el("section", { className: "plate", data: { role: "grid" } }, [
        el("h3", { text: "plate layout (row pools)" }),
        el("table", { className: "grid" }, [body]),
      ]),
    );
  }

  private renderTimeline(session: SessionDoc): void {
    if (session.history.length === 0) return;
    const items = session.history.map((entry) =>
      el("li", {
        text: `round ${entry.round_index}: ` +
          entry.outcomes.map((outcome) => (outcome ? "+" : "-")).join(" "),
        data: { round: String(entry.round_index) },
      }),
    );
    this.panel.append(
      el("section", { className: "timeline", data: { role: "timeline" } }, [
        el("h3", { text: "submitted rounds" }),
        el("ol", {}, items),
      ]),
    );
  }

  private renderResult(session: SessionDoc): void {
    if (session.status === "finished") {
      const positives = session.resolved_positives;
      this.panel.append(
        el("div", {
          className: "banner success",
          text:
            positives.length > 0
              ? `Positive samples: ${positives.join(", ")}`
              : "No positives detected.",
          data: { role: "result" },
        }),
      );
    } else if (session.status === "failed") {
      this.panel.append(
        el("div", {
          className: "banner error",
          text: `Inconclusive (${session.failure_reason ?? "unknown"}). ${guidanceFor(session.failure_reason)}`,
          data: { role: "result" },
        }),
      );
    }
  }

  private renderPending(session: SessionDoc): void {
    const pending = session.pending_round;
    if (pending === null) return;

    const pools = pending.pools.map((pool, index) => this.renderPool(pool, index));
    const submitButton = el("button", {
      className: "primary",
      text: "submit round results",
      attrs: { type: "button" },
      data: { role: "submit" },
    });
    submitButton.disabled = this.entries.some((entry) => entry === null);
    submitButton.addEventListener("click", () => this.submit());

    this.panel.append(
      el("section", { className: "pending", data: { role: "pending" } }, [
        el("h3", {
          text: `round ${pending.round_index}: enter a result for every pool`,
          data: { role: "pending-title" },
        }),
        el("div", { className: "pools" }, pools),
        submitButton,
      ]),
    );
  }

  private renderPool(pool: number[], index: number): HTMLElement {
    const copyButton = el("button", {
      className: "copy",
      text: "copy",
      attrs: { type: "button", "aria-label": `copy pool ${index}` },
      data: { role: "copy" },
    });
    copyButton.addEventListener("click", () => {
      this.tasks.run(() => this.clipboard(pool.join(", ")));
    });

    const mark = (positive: boolean, label: string, role: string): HTMLButtonElement => {
      const button = el("button", {
        className: this.entries[index] === positive ? "mark selected" : "mark",
        text: label,
        attrs: { type: "button" },
        data: { role },
      });
      button.addEventListener("click", () => {
        this.entries[index] = positive;
        this.renderSession();
      });
      return button;
    };

    return el("div", { className: "pool", data: { pool: String(index) } }, [
      el("header", {}, [
        el("strong", { text: `pool ${index}` }),
        el("span", { text: ` (${pool.length} samples) ` }),
        copyButton,
      ]),
      el("div", { className: "samples", text: pool.join(", ") }),
      el("div", { className: "marks" }, [
        mark(false, "negative", "mark-negative"),
        mark(true, "positive", "mark-positive"),
      ]),
    ]);
  }
}
