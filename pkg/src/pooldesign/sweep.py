"""Batch design generation over a (method, samples, capacity) grid.

A manifest pins every input, including seeds and evaluation budgets, so a
sweep is a pure function of its manifest: rerunning one produces the same
bytes, and interrupted runs resume by skipping cells whose design file
already exists and validates.  Nothing time-dependent is ever written into
the output tree; the manifest's own `created_at` stays outside it.
"""
from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping

from . import __version__
from .constructors import build, method_specs, parse_method_spec
from .core import Design, design_from_json, design_to_json
from .errors import BadInputError, PoolDesignError
from .evaluate import metrics

CSV_COLUMNS = (
    "method",
    "S",
    "D",
    "tests_worst",
    "tests_per_sample",
    "steps_worst",
    "max_group_size",
    "exact",
    "infeasible_reason",
)

# the desk-scale defaults: every method over the full single-positive range,
# higher capacities held to the sizes where the searches stay affordable
DESK_S_MAX = 500
DESK_S_LIMITS = {"2": [10, 100], "3": [10, 100], "4": [10, 100]}
DESK_SEARCH_BUDGET = 60_000
DESK_SEARCH_DRAWS = 2_000


def default_manifest(output_root: str) -> dict:
    methods = sorted(set(method_specs(1) + ["cr_special2", "cr_special3"]))
    return {
        "methods": methods,
        "s_values": list(range(2, DESK_S_MAX + 1)),
        "d_values": [1, 2, 3, 4],
        "s_limits_by_d": dict(DESK_S_LIMITS),
        "enumeration_budget": 2_000_000,
        "mc_draws": 10_000,
        "search_budget": DESK_SEARCH_BUDGET,
        "search_draws": DESK_SEARCH_DRAWS,
        "trials": 5,
        "seed": 0,
        "output_root": output_root,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "tool_version": __version__,
    }


def load_manifest(source: str | Path | Mapping) -> dict:
    if isinstance(source, Mapping):
        manifest = dict(source)
    else:
        try:
            manifest = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise BadInputError(f"cannot read manifest: {exc}") from exc
    for key in ("methods", "s_values", "d_values", "output_root"):
        if key not in manifest:
            raise BadInputError(f"manifest is missing {key!r}")
    for spec in manifest["methods"]:
        parse_method_spec(str(spec))
    manifest.setdefault("s_limits_by_d", {})
    manifest.setdefault("enumeration_budget", 2_000_000)
    manifest.setdefault("mc_draws", 10_000)
    manifest.setdefault("search_budget", None)
    manifest.setdefault("search_draws", None)
    manifest.setdefault("trials", 5)
    manifest.setdefault("seed", 0)
    return manifest


def _method_dir(spec: str) -> str:
    return spec.replace(":", "")


def _supports(spec: str, differentiate: int) -> bool:
    if spec == "cr_special2":
        return differentiate == 2
    if spec == "cr_special3":
        return differentiate == 3
    return True


def cells(manifest: Mapping) -> list[tuple[str, int, int]]:
    """Grid cells in evaluation order (capacity, then size, then method)."""
    limits = {int(k): v for k, v in manifest.get("s_limits_by_d", {}).items()}
    out = []
    for d in manifest["d_values"]:
        lo, hi = limits.get(int(d), (None, None)) or (None, None)
        for s in manifest["s_values"]:
            if lo is not None and s < lo:
                continue
            if hi is not None and s > hi:
                continue
            for spec in manifest["methods"]:
                if _supports(str(spec), int(d)):
                    out.append((str(spec), int(s), int(d)))
    return out


def _cell_path(root: Path, spec: str, s: int, d: int) -> Path:
    return root / _method_dir(spec) / f"S{s}_D{d}.json"


def _load_valid(path: Path, spec: str, s: int, d: int) -> Design | None:
    try:
        design = design_from_json(path.read_text())
    except (OSError, PoolDesignError):
        return None
    name, extra = parse_method_spec(spec)
    if design.method != name or design.samples != s or design.differentiate != d:
        return None
    if name == "multidim" and design.params.get("dims") != extra["dims"]:
        return None
    return design


def run_sweep(
    source: str | Path | Mapping,
    progress: Callable[[str], None] | None = None,
) -> dict:
    """Build every grid cell, then write the summary CSV and infeasibility log.

    Per-cell failures become infeasibility records; only I/O errors abort.
    """
    manifest = load_manifest(source)
    root = Path(manifest["output_root"])
    root.mkdir(parents=True, exist_ok=True)

    grid = cells(manifest)
    rows: list[list[str]] = []
    infeasible: list[tuple[str, int, int, str]] = []
    built = skipped = 0

    for spec, s, d in grid:
        path = _cell_path(root, spec, s, d)
        design = _load_valid(path, spec, s, d) if path.exists() else None
        if design is not None:
            skipped += 1
        else:
            try:
                design = build(
                    spec,
                    s,
                    d,
                    seed=int(manifest["seed"]),
                    trials=int(manifest["trials"]),
                    fitness_budget=manifest["search_budget"],
                    fitness_draws=manifest["search_draws"],
                )
            except PoolDesignError as exc:
                infeasible.append((spec, s, d, str(exc)))
                rows.append([spec, str(s), str(d), "", "", "", "", "", str(exc)])
                continue
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(design_to_json(design))
            built += 1
        m = metrics(
            design,
            enumeration_budget=int(manifest["enumeration_budget"]),
            mc_draws=int(manifest["mc_draws"]),
            seed=int(manifest["seed"]),
        )
        rows.append(
            [
                spec,
                str(s),
                str(d),
                str(m.tests_worst),
                str(m.tests_per_sample),
                str(m.steps_worst),
                str(m.max_group_size),
                "true" if m.exact else "false",
                "",
            ]
        )
        if progress is not None and (built + skipped) % 200 == 0:
            progress(f"{built + skipped}/{len(grid)} cells")

    rows.sort(key=lambda r: (r[0], int(r[1]), int(r[2])))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    (root / "metrics.csv").write_text(buf.getvalue())

    infeasible.sort()
    log_lines = [f"{spec},S={s},D={d}: {reason}" for spec, s, d, reason in infeasible]
    (root / "infeasible.log").write_text("".join(line + "\n" for line in log_lines))

    return {
        "cells_total": len(grid),
        "built": built,
        "skipped": skipped,
        "feasible": len(grid) - len(infeasible),
        "infeasible": len(infeasible),
        "output_root": str(root),
    }


METRIC_COLUMNS = ("tests_worst", "tests_per_sample", "steps_worst", "max_group_size")


def read_metrics(root: str | Path) -> list[dict]:
    """Rows of a sweep's metrics.csv as dicts; empty metric fields mean the
    cell was infeasible."""
    path = Path(root) / "metrics.csv"
    try:
        with path.open(newline="") as handle:
            return list(csv.DictReader(handle))
    except OSError as exc:
        raise BadInputError(f"no sweep output at {root}: {exc}") from exc


def export_comparison(
    root: str | Path,
    differentiate: int | None = None,
    methods: Iterable[str] | None = None,
    s_min: int | None = None,
    s_max: int | None = None,
    metric: str | None = None,
) -> dict:
    """Long-format (method, S, D, metric, value) table from a sweep store.

    Filtered-in cells without a usable value are reported under `missing`
    rather than dropped.
    """
    if metric is not None and metric not in METRIC_COLUMNS:
        raise BadInputError(f"metric must be one of {', '.join(METRIC_COLUMNS)}")
    wanted = set(methods) if methods is not None else None
    out_rows: list[dict] = []
    missing: list[dict] = []
    for row in read_metrics(root):
        s, d = int(row["S"]), int(row["D"])
        if differentiate is not None and d != differentiate:
            continue
        if wanted is not None and row["method"] not in wanted:
            continue
        if s_min is not None and s < s_min:
            continue
        if s_max is not None and s > s_max:
            continue
        if row["tests_worst"] == "":
            missing.append(
                {
                    "method": row["method"],
                    "S": s,
                    "D": d,
                    "reason": row["infeasible_reason"] or "not produced",
                }
            )
            continue
        for name in METRIC_COLUMNS if metric is None else (metric,):
            value = float(row[name]) if name == "tests_per_sample" else int(row[name])
            out_rows.append(
                {"method": row["method"], "S": s, "D": d, "metric": name, "value": value}
            )
    return {
        "columns": ["method", "S", "D", "metric", "value"],
        "rows": out_rows,
        "missing": missing,
    }
