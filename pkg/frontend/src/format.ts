/** Presentation helpers for comparison tables: sorting, limits, CSV export. */

import type { ComparisonRow } from "./api.js";

export type MetricKey = "tests_worst" | "tests_per_sample" | "steps_worst" | "max_group_size";

export const METRIC_LABELS: Record<MetricKey, string> = {
  tests_worst: "tests",
  tests_per_sample: "tests per sample",
  steps_worst: "steps",
  max_group_size: "max group size",
};

export const sortRows = (rows: ComparisonRow[], metric: MetricKey): ComparisonRow[] =>
  [...rows].sort(
    (a, b) => a[metric] - b[metric] || (a.method < b.method ? -1 : a.method > b.method ? 1 : 0),
  );

export interface Limits {
  maxGroupSize: number | null;
  maxSteps: number | null;
}

/**
 * Names every constraint a row breaks, in the same wording the service uses
 * when a comparison is asked to enforce limits.  Applying limits here lets
 * them change instantly without refetching the committed comparison.
 */
export const violationsFor = (row: ComparisonRow, limits: Limits): string[] => {
  const found = [...row.violations];
  if (limits.maxGroupSize !== null && row.max_group_size > limits.maxGroupSize) {
    found.push(`max group size ${row.max_group_size} exceeds limit ${limits.maxGroupSize}`);
  }
  if (limits.maxSteps !== null && row.steps_worst > limits.maxSteps) {
    found.push(`steps ${row.steps_worst} exceeds limit ${limits.maxSteps}`);
  }
  return found;
};

const CSV_HEADER = "method,tests_worst,tests_per_sample,steps_worst,max_group_size,exact";

export const toCsv = (rows: ComparisonRow[]): string => {
  const lines = rows.map((row) =>
    [
      row.method,
      row.tests_worst,
      row.tests_per_sample,
      row.steps_worst,
      row.max_group_size,
      row.exact,
    ].join(","),
  );
  return [CSV_HEADER, ...lines].join("\n") + "\n";
};

/** Probabilities spanning many decades read better in scientific notation. */
export const formatProb = (value: number): string =>
  value > 0 && value < 1e-3 ? value.toExponential(3) : String(value);
