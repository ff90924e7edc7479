/** Mounting and DOM-poking helpers shared by the browser tests. */

import { ApiClient } from "../src/api.js";
import { App, createApp } from "../src/app.js";
import { FakeService } from "./fake-server.js";

export interface SavedFile {
  name: string;
  text: string;
  mime: string;
}

export interface Harness {
  fake: FakeService;
  app: App;
  root: HTMLElement;
  saved: SavedFile[];
  copied: string[];
}

export interface MountOptions {
  fake?: FakeService;
  hash?: string;
  /** Keep previously mounted apps in the document (second tab on one page). */
  keep?: boolean;
}

export function mount(options: MountOptions = {}): Harness {
  if (!options.keep) document.body.replaceChildren();
  window.location.hash = options.hash ?? "";
  const fake = options.fake ?? new FakeService();
  const root = document.createElement("div");
  document.body.append(root);
  const saved: SavedFile[] = [];
  const copied: string[] = [];
  const app = createApp(root, new ApiClient("http://fake.test", fake.fetch), {
    saveFile: (name, text, mime) => {
      saved.push({ name, text, mime });
    },
    clipboard: async (text) => {
      copied.push(text);
    },
  });
  return { fake, app, root, saved, copied };
}

export const q = <T extends HTMLElement = HTMLElement>(scope: ParentNode, selector: string): T => {
  const node = scope.querySelector(selector);
  if (node === null) throw new Error(`no element matches ${selector}`);
  return node as T;
};

export const maybe = (scope: ParentNode, selector: string): HTMLElement | null =>
  scope.querySelector(selector);

export const textOf = (scope: ParentNode, selector: string): string =>
  (q(scope, selector).textContent ?? "").trim();

export const setValue = (scope: ParentNode, role: string, value: string): void => {
  const input = q<HTMLInputElement>(scope, `[data-role="${role}"]`);
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
};

export const setSelect = (scope: ParentNode, role: string, value: string): void => {
  const select = q<HTMLSelectElement>(scope, `[data-role="${role}"]`);
  select.value = value;
  select.dispatchEvent(new Event("change", { bubbles: true }));
};

export const click = (scope: ParentNode, selector: string): void => {
  q(scope, selector).click();
};

export const methodRow = (scope: ParentNode, method: string): HTMLTableRowElement =>
  q<HTMLTableRowElement>(scope, `tr[data-method="${method}"]`);

export const rowOrder = (scope: ParentNode): string[] =>
  [...scope.querySelectorAll("tbody tr")].map((row) => (row as HTMLElement).dataset.method ?? "");

export const cellText = (row: HTMLTableRowElement, col: string): string =>
  (q(row, `td[data-col="${col}"]`).textContent ?? "").trim();

/** Fills the explorer form and commits it. */
export async function computePlan(
  h: Harness,
  samples: string,
  prevalence: string,
  tolerance: string,
): Promise<void> {
  const scope = h.app.explorer.root;
  setValue(scope, "samples", samples);
  setValue(scope, "prevalence", prevalence);
  setValue(scope, "tolerance", tolerance);
  click(scope, '[data-role="compute"]');
  await h.app.idle();
}

/** Marks pool `index` of the pending round as positive or negative. */
export const markPool = (h: Harness, index: number, positive: boolean): void => {
  const pool = q(h.app.session.root, `[data-pool="${index}"]`);
  click(pool, `[data-role="${positive ? "mark-positive" : "mark-negative"}"]`);
};

/** Enters a whole round of outcomes and submits it. */
export async function submitRound(h: Harness, outcomes: boolean[]): Promise<void> {
  outcomes.forEach((outcome, index) => markPool(h, index, outcome));
  click(h.app.session.root, '[data-role="submit"]');
  await h.app.idle();
}
