import { describe, expect, it } from "vitest";

import { FakeService, fixtureRows, fixtures } from "./fake-server.js";
import {
  cellText,
  click,
  computePlan,
  methodRow,
  mount,
  rowOrder,
  setSelect,
  setValue,
  textOf,
} from "./helpers.js";

const comparison500 = fixtureRows(0);
const comparison100 = fixtureRows(1);

describe("explorer", () => {
  it("sorting by tests places binary first with 9 tests at S=500, rho=0.001", async () => {
    const h = mount();
    await computePlan(h, "500", "0.001", "0.1");

    expect(textOf(h.root, '[data-role="capacity"]')).toBe("1");
    expect(textOf(h.root, '[data-role="part-samples"]')).toBe("500");
    expect(textOf(h.root, '[data-role="table-caption"]')).toBe(
      "comparison at 500 samples, capacity 1",
    );

    const order = rowOrder(h.root);
    expect(order).toHaveLength(comparison500.rows.length);
    expect(order[0]).toBe("binary");
    expect(cellText(methodRow(h.root, "binary"), "tests_worst")).toBe("9");
    expect(methodRow(h.root, "binary").classList.contains("violates")).toBe(false);
  });

  it("applying a max group size of 10 greys binary and names the constraint", async () => {
    const h = mount();
    await computePlan(h, "500", "0.001", "0.1");
    setValue(h.root, "max-group-size", "10");

    const binary = methodRow(h.root, "binary");
    expect(binary.classList.contains("violates")).toBe(true);
    expect(cellText(binary, "constraints")).toBe("max group size 250 exceeds limit 10");
    expect(binary.querySelector("input")?.disabled).toBe(true);

    // binary stays in the table, greyed, still first on the tests sort
    expect(rowOrder(h.root)[0]).toBe("binary");
  });

  it("applying a step limit names the steps constraint", async () => {
    const h = mount();
    await computePlan(h, "500", "0.001", "0.1");
    setValue(h.root, "max-steps", "1");

    const hierarchical = comparison500.rows.find((row) => row.method === "hierarchical");
    expect(hierarchical).toBeDefined();
    expect(cellText(methodRow(h.root, "hierarchical"), "constraints")).toBe(
      `steps ${hierarchical!.steps_worst} exceeds limit 1`,
    );
  });

  it("reorders rows when the sort metric changes", async () => {
    const h = mount();
    await computePlan(h, "500", "0.001", "0.1");
    setSelect(h.root, "sort-metric", "max_group_size");

    const expected = [...comparison500.rows].sort(
      (a, b) => a.max_group_size - b.max_group_size || a.method.localeCompare(b.method),
    )[0].method;
    expect(rowOrder(h.root)[0]).toBe(expected);
  });

  it("shows the refusal note verbatim when the tolerance is unattainable", async () => {
    const h = mount();
    await computePlan(h, "100", "0.2", "0.01");

    const note = fixtures.recommend[2].response as { note: string };
    expect(textOf(h.root, '[data-role="banner"]')).toBe(note.note);
    expect(textOf(h.root, '[data-role="advisable"]')).toBe("no");
    expect(h.root.querySelector('[data-role="comparison-table"] tbody tr')).toBeNull();
  });

  it("keeps a persistent banner and the entered inputs when the service is unreachable", async () => {
    const h = mount();
    h.fake.down = true;
    await computePlan(h, "500", "0.001", "0.1");

    expect(textOf(h.root, '[data-role="banner"]')).toContain("unreachable");
    expect(h.root.querySelector<HTMLInputElement>('[data-role="samples"]')?.value).toBe("500");
    expect(h.root.querySelector<HTMLInputElement>('[data-role="prevalence"]')?.value).toBe("0.001");

    h.fake.down = false;
    click(h.root, '[data-role="compute"]');
    await h.app.idle();
    expect(h.root.querySelector('[data-role="banner"]')?.className).toContain("hidden");
    expect(rowOrder(h.root)[0]).toBe("binary");
  });

  it("never lets a slow older commit overwrite a newer one", async () => {
    const h = mount();
    const release = h.fake.hold("POST /api/recommend");

    setValue(h.root, "samples", "500");
    setValue(h.root, "prevalence", "0.001");
    setValue(h.root, "tolerance", "0.1");
    click(h.root, '[data-role="compute"]'); // stalls on the hold

    setValue(h.root, "samples", "100");
    setValue(h.root, "prevalence", "0.02");
    setValue(h.root, "tolerance", "0.001");
    click(h.root, '[data-role="compute"]'); // answers immediately

    release();
    await h.app.idle();

    expect(textOf(h.root, '[data-role="table-caption"]')).toBe(
      "comparison at 25 samples, capacity 4",
    );
    const binary = comparison100.rows.find((row) => row.method === "binary");
    expect(cellText(methodRow(h.root, "binary"), "tests_worst")).toBe(
      String(binary!.tests_worst),
    );
  });

  it("does not call the service when the inputs are not numbers", async () => {
    const h = mount();
    setValue(h.root, "samples", "");
    click(h.root, '[data-role="compute"]');
    await h.app.idle();

    expect(textOf(h.root, '[data-role="banner"]')).toContain("must all be numbers");
    expect(h.fake.calls.filter((call) => call.path === "/api/recommend")).toHaveLength(0);
  });

  it("downloads the selected design exactly as the server sent it", async () => {
    const h = mount();
    await computePlan(h, "500", "0.001", "0.1");

    const pick = methodRow(h.root, "binary").querySelector("input");
    pick?.click();
    click(h.root, '[data-role="download-design"]');
    await h.app.idle();

    expect(h.saved).toHaveLength(1);
    expect(h.saved[0].name).toBe("design_binary_S500_D1.json");
    expect(h.saved[0].mime).toBe("application/json");
    const recorded = fixtures.design.find(
      (entry) => (entry.request as { method: string }).method === "binary",
    );
    expect(JSON.parse(h.saved[0].text)).toEqual(recorded!.response);
  });

  it("downloads the comparison table as CSV in the current sort order", async () => {
    const h = mount();
    await computePlan(h, "500", "0.001", "0.1");
    click(h.root, '[data-role="download-csv"]');

    expect(h.saved).toHaveLength(1);
    const lines = h.saved[0].text.trim().split("\n");
    expect(lines[0]).toBe("method,tests_worst,tests_per_sample,steps_worst,max_group_size,exact");
    expect(lines[1].startsWith("binary,9,")).toBe(true);
    expect(lines).toHaveLength(comparison500.rows.length + 1);
  });
});
