/**
 * Design exploration view.
 *
 * The user commits samples, prevalence, and tolerance with an explicit
 * button; the service answers with a plan (capacity, splits) and a method
 * comparison, rendered as a sortable table.  Group-size and step limits are
 * applied on top of the committed rows: violating methods stay visible but
 * greyed, with every broken constraint named.
 */

import {
  ApiClient,
  describeError,
  type ComparisonRow,
  type DesignDoc,
  type Plan,
} from "./api.js";
import { clear, el } from "./dom.js";
import {
  METRIC_LABELS,
  formatProb,
  sortRows,
  toCsv,
  violationsFor,
  type Limits,
  type MetricKey,
} from "./format.js";
import { TaskGroup } from "./tasks.js";

export type SaveFile = (name: string, text: string, mime: string) => void;

export interface ExplorerOptions {
  saveFile?: SaveFile;
  onRunSession?: (design: DesignDoc) => void;
}

const browserSave: SaveFile = (name, text, mime) => {
  const url = URL.createObjectURL(new Blob([text], { type: mime }));
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = name;
  anchor.click();
  URL.revokeObjectURL(url);
};

interface SpecParts {
  method: string;
  dims?: number;
}

// "multidim:3" names the multidim constructor with its dims parameter
const splitSpec = (spec: string): SpecParts => {
  const colon = spec.indexOf(":");
  if (colon < 0) return { method: spec };
  return { method: spec.slice(0, colon), dims: Number(spec.slice(colon + 1)) };
};

export class ExplorerView {
  readonly root: HTMLElement;
  readonly tasks = new TaskGroup();

  private readonly saveFile: SaveFile;
  private readonly onRunSession?: (design: DesignDoc) => void;

  private plan: Plan | null = null;
  private selectedMethod: string | null = null;
  private metric: MetricKey = "tests_worst";
  private commitToken = 0;

  private readonly samplesInput: HTMLInputElement;
  private readonly prevalenceInput: HTMLInputElement;
  private readonly toleranceInput: HTMLInputElement;
  private readonly maxGroupInput: HTMLInputElement;
  private readonly maxStepsInput: HTMLInputElement;
  private readonly sortSelect: HTMLSelectElement;
  private readonly banner: HTMLElement;
  private readonly planPanel: HTMLElement;
  private readonly tableSection: HTMLElement;
  private readonly tableCaption: HTMLElement;
  private readonly tableBody: HTMLTableSectionElement;
  private readonly infeasibleList: HTMLElement;
  private readonly downloadDesignButton: HTMLButtonElement;
  private readonly downloadCsvButton: HTMLButtonElement;
  private readonly runSessionButton: HTMLButtonElement;

  constructor(
    private readonly client: ApiClient,
    options: ExplorerOptions = {},
  ) {
    this.saveFile = options.saveFile ?? browserSave;
    this.onRunSession = options.onRunSession;

    this.samplesInput = this.numberInput("samples", "96", "1");
    this.prevalenceInput = this.numberInput("prevalence", "0.02", "any");
    this.toleranceInput = this.numberInput("tolerance", "0.001", "any");
    this.maxGroupInput = this.numberInput("max-group-size", "", "1");
    this.maxStepsInput = this.numberInput("max-steps", "", "1");

    const computeButton = el("button", {
      className: "primary",
      text: "compute",
      attrs: { type: "button" },
      data: { role: "compute" },
    });
    computeButton.addEventListener("click", () => this.compute());

    this.sortSelect = el("select", { data: { role: "sort-metric" } });
    for (const [key, label] of Object.entries(METRIC_LABELS)) {
      this.sortSelect.append(el("option", { text: label, attrs: { value: key } }));
    }
    this.sortSelect.addEventListener("change", () => {
      this.metric = this.sortSelect.value as MetricKey;
      this.renderTable();
    });
    for (const limitInput of [this.maxGroupInput, this.maxStepsInput]) {
      limitInput.addEventListener("input", () => this.renderTable());
    }

    this.banner = el("div", { className: "banner hidden", data: { role: "banner" } });
    this.planPanel = el("dl", { className: "plan hidden", data: { role: "plan-panel" } });

    this.tableCaption = el("caption", { data: { role: "table-caption" } });
    this.tableBody = el("tbody");
    const table = el("table", { className: "comparison", data: { role: "comparison-table" } }, [
      this.tableCaption,
      el("thead", {}, [
        el("tr", {}, [
          el("th", { text: "method" }),
          el("th", { text: "tests" }),
          el("th", { text: "tests/sample" }),
          el("th", { text: "steps" }),
          el("th", { text: "max group" }),
          el("th", { text: "exact" }),
          el("th", { text: "constraints" }),
          el("th", { text: "use" }),
        ]),
      ]),
      this.tableBody,
    ]);

    this.downloadDesignButton = el("button", {
      text: "download design",
      attrs: { type: "button", disabled: "" },
      data: { role: "download-design" },
    });
    this.downloadDesignButton.addEventListener("click", () => this.downloadDesign());
    this.downloadCsvButton = el("button", {
      text: "download table CSV",
      attrs: { type: "button" },
      data: { role: "download-csv" },
    });
    this.downloadCsvButton.addEventListener("click", () => this.downloadCsv());
    this.runSessionButton = el("button", {
      text: "run a session with this design",
      attrs: { type: "button", disabled: "" },
      data: { role: "run-session" },
    });
    this.runSessionButton.addEventListener("click", () => this.runSession());

    this.infeasibleList = el("ul", { className: "infeasible", data: { role: "infeasible-list" } });
    this.tableSection = el("section", { className: "results hidden" }, [
      el("div", { className: "table-tools" }, [
        el("label", { text: "sort by " }, [this.sortSelect]),
        this.downloadCsvButton,
        this.downloadDesignButton,
        this.runSessionButton,
      ]),
      table,
      this.infeasibleList,
    ]);

    this.root = el("section", { className: "explorer" }, [
      el("form", { className: "inputs", attrs: { autocomplete: "off" } }, [
        this.labelled("samples (S)", this.samplesInput),
        this.labelled("prevalence", this.prevalenceInput),
        this.labelled("error tolerance", this.toleranceInput),
        this.labelled("max group size", this.maxGroupInput),
        this.labelled("max steps", this.maxStepsInput),
        computeButton,
      ]),
      this.banner,
      this.planPanel,
      this.tableSection,
    ]);
  }

  private numberInput(role: string, value: string, step: string): HTMLInputElement {
    return el("input", {
      attrs: { type: "number", value, step, min: "0" },
      data: { role },
    });
  }

  private labelled(text: string, input: HTMLElement): HTMLElement {
    return el("label", { className: "field" }, [el("span", { text }), input]);
  }

  private showBanner(kind: "error" | "warn", text: string): void {
    this.banner.className = `banner ${kind}`;
    this.banner.textContent = text;
  }

  private hideBanner(): void {
    this.banner.className = "banner hidden";
    this.banner.textContent = "";
  }

  private limits(): Limits {
    const read = (input: HTMLInputElement): number | null => {
      const value = Number(input.value);
      return input.value !== "" && Number.isFinite(value) ? value : null;
    };
    return { maxGroupSize: read(this.maxGroupInput), maxSteps: read(this.maxStepsInput) };
  }

  compute(): void {
    this.tasks.run(async () => {
      const token = ++this.commitToken;
      const samples = Number(this.samplesInput.value);
      const prevalence = Number(this.prevalenceInput.value);
      const tolerance = Number(this.toleranceInput.value);
      if (
        this.samplesInput.value === "" ||
        !Number.isFinite(samples) ||
        !Number.isFinite(prevalence) ||
        !Number.isFinite(tolerance)
      ) {
        this.showBanner("error", "samples, prevalence, and tolerance must all be numbers");
        return;
      }
      try {
        const plan = await this.client.recommend({ samples, prevalence, tolerance });
        // an older reply must never overwrite a newer commit
        if (token !== this.commitToken) return;
        this.plan = plan;
        this.selectedMethod = null;
        this.hideBanner();
        if (!plan.advisable && plan.note) this.showBanner("warn", plan.note);
        this.renderPlan();
        this.renderTable();
      } catch (err) {
        if (token !== this.commitToken) return;
        this.showBanner("error", describeError(err));
      }
    });
  }

  private renderPlan(): void {
    const plan = this.plan;
    clear(this.planPanel);
    if (plan === null) {
      this.planPanel.classList.add("hidden");
      return;
    }
    this.planPanel.classList.remove("hidden");
    const pair = (label: string, role: string, value: string): void => {
      this.planPanel.append(
        el("div", { className: "stat" }, [
          el("dt", { text: label }),
          el("dd", { text: value, data: { role } }),
        ]),
      );
    };
    pair("advisable", "advisable", plan.advisable ? "yes" : "no");
    if (plan.differentiate !== null && plan.splits !== null && plan.part_samples !== null) {
      pair("capacity (D)", "capacity", String(plan.differentiate));
      pair("splits", "splits", String(plan.splits));
      pair("samples per split", "part-samples", String(plan.part_samples));
      pair("failure probability", "error-prob", formatProb(plan.error_prob ?? 0));
    }
  }

  private renderTable(): void {
    const comparison = this.plan?.comparison;
    if (!comparison) {
      this.tableSection.classList.add("hidden");
      clear(this.tableBody);
      return;
    }
    this.tableSection.classList.remove("hidden");
    this.tableCaption.textContent =
      `comparison at ${comparison.samples} samples, capacity ${comparison.differentiate}`;
    const limits = this.limits();
    clear(this.tableBody);
    for (const row of sortRows(comparison.rows, this.metric)) {
      this.tableBody.append(this.renderRow(row, violationsFor(row, limits)));
    }
    this.downloadDesignButton.disabled = this.selectedMethod === null;
    this.runSessionButton.disabled = this.selectedMethod === null;
    clear(this.infeasibleList);
    for (const entry of comparison.infeasible) {
      this.infeasibleList.append(
        el("li", { text: `${entry.method}: ${entry.reason}`, data: { method: entry.method } }),
      );
    }
  }

  private renderRow(row: ComparisonRow, violations: string[]): HTMLTableRowElement {
    const pick = el("input", {
      attrs: { type: "radio", "aria-label": `use ${row.method}` },
      data: { role: "pick" },
    });
    pick.disabled = violations.length > 0;
    pick.checked = row.method === this.selectedMethod;
    pick.addEventListener("change", () => {
      this.selectedMethod = row.method;
      this.renderTable();
    });
    const cell = (col: string, text: string): HTMLTableCellElement =>
      el("td", { text, data: { col } });
    const tr = el("tr", { className: violations.length > 0 ? "violates" : "", data: { method: row.method } }, [
      cell("method", row.method),
      cell("tests_worst", String(row.tests_worst)),
      cell("tests_per_sample", String(row.tests_per_sample)),
      cell("steps_worst", String(row.steps_worst)),
      cell("max_group_size", String(row.max_group_size)),
      cell("exact", row.exact ? "exact" : "estimate"),
      cell("constraints", violations.join("; ")),
      el("td", {}, [pick]),
    ]);
    return tr;
  }

  private selectedRequest(): { method: string; samples: number; differentiate: number; dims?: number } | null {
    const plan = this.plan;
    if (plan === null || this.selectedMethod === null) return null;
    if (plan.part_samples === null || plan.differentiate === null) return null;
    const parts = splitSpec(this.selectedMethod);
    const request: { method: string; samples: number; differentiate: number; dims?: number } = {
      method: parts.method,
      samples: plan.part_samples,
      differentiate: plan.differentiate,
    };
    if (parts.dims !== undefined) request.dims = parts.dims;
    return request;
  }

  private downloadDesign(): void {
    const request = this.selectedRequest();
    if (request === null) return;
    this.tasks.run(async () => {
      try {
        const { text } = await this.client.designDocument(request);
        const dims = request.dims === undefined ? "" : `x${request.dims}`;
        this.saveFile(
          `design_${request.method}${dims}_S${request.samples}_D${request.differentiate}.json`,
          text,
          "application/json",
        );
      } catch (err) {
        this.showBanner("error", describeError(err));
      }
    });
  }

  private downloadCsv(): void {
    const comparison = this.plan?.comparison;
    if (!comparison) return;
    this.saveFile(
      `comparison_S${comparison.samples}_D${comparison.differentiate}.csv`,
      toCsv(sortRows(comparison.rows, this.metric)),
      "text/csv",
    );
  }

  private runSession(): void {
    const request = this.selectedRequest();
    if (request === null || this.onRunSession === undefined) return;
    const handoff = this.onRunSession;
    this.tasks.run(async () => {
      try {
        const doc = await this.client.design(request);
        handoff(doc);
      } catch (err) {
        this.showBanner("error", describeError(err));
      }
    });
  }
}
