"""Command-line interface.

Every JSON document printed here is rendered by the same canonical writer
the HTTP service uses, so scripts can swap freely between the two.  Error
exits are keyed to the shared error kinds: 2 bad input, 3 infeasible,
4 inconclusive, 5 not found, 6 internal.
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from .constructors import build
from .core import canonical_json, design_from_json, design_to_json
from .decode import INCONCLUSIVE, decode_round, parse_results
from .errors import BadInputError, EXIT_CODES, ErrorKind, NotFoundError, PoolDesignError
from .evaluate import compare_methods, metrics
from .prevalence import error_rate_report, recommend
from .session import (
    AWAITING,
    FINISHED,
    session_from_json,
    session_start,
    session_submit,
    session_to_json,
)
from .sweep import default_manifest, export_comparison, run_sweep

_FORMATS = click.Choice(["json", "csv", "table"])


def _fail(exc: PoolDesignError) -> None:
    click.echo(f"error ({exc.kind.value}): {exc}", err=True)
    sys.exit(exc.exit_code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PoolDesignError as exc:
            _fail(exc)

    return wrapper


def _emit(payload: dict) -> None:
    click.echo(canonical_json(payload), nl=False)


def _read_file(path: str, what: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise NotFoundError(f"cannot read {what} at {path}: {exc}") from exc


def _load_design(path: str):
    return design_from_json(_read_file(path, "design document"))


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _csv_text(headers: list[str], rows: list[list[str]]) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue()


@click.group()
@click.version_option(version=__version__, prog_name="pooldesign")
def main() -> None:
    """Pooled-testing designs: build, decode, run sessions, evaluate."""


@main.command()
@click.option("--method", required=True, help="Method name, e.g. matrix or multidim:4.")
@click.option("--samples", type=int, required=True)
@click.option("--differentiate", type=int, default=1, show_default=True)
@click.option("--dims", type=int, default=None, help="Dimension count for multidim.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for random.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")
@_guarded
def design(method: str, samples: int, differentiate: int, dims: int | None, seed: int, out: str | None) -> None:
    """Build a design document."""
    built = build(method, samples, differentiate, seed=seed, dims=dims)
    text = design_to_json(built)
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


@main.command()
@click.option("--design", "design_path", required=True, type=click.Path(dir_okay=False))
@click.option("--results", required=True, help='Pool readouts, e.g. "0101" or "-+-+".')
@_guarded
def decode(design_path: str, results: str) -> None:
    """Decode one round of results (exit 4 when inconclusive)."""
    doc = _load_design(design_path)
    outcome = decode_round(doc, doc.rounds[0], parse_results(results))
    _emit(outcome.to_dict())
    if outcome.kind == INCONCLUSIVE:
        sys.exit(EXIT_CODES[ErrorKind.INCONCLUSIVE])


@main.group()
def session() -> None:
    """Multi-round testing sessions backed by a state file."""


def _session_view(state) -> dict:
    if state.status == AWAITING:
        assert state.pending_round is not None
        return {
            "status": state.status,
            "version": state.version,
            "pending_round": {
                "round_index": state.pending_round.round_index,
                "pools": [list(p) for p in state.pending_round.pools],
            },
        }
    if state.status == FINISHED:
        return {
            "status": state.status,
            "version": state.version,
            "resolved_positives": list(state.resolved_positives or ()),
            "tests_used": state.tests_used,
            "rounds_used": state.rounds_used,
        }
    return {
        "status": state.status,
        "version": state.version,
        "failure_reason": state.failure_reason,
    }


@session.command("new")
@click.option("--design", "design_path", required=True, type=click.Path(dir_okay=False))
@click.option("--state", "state_path", required=True, type=click.Path(dir_okay=False))
@_guarded
def session_new(design_path: str, state_path: str) -> None:
    """Start a session; prints the first round to test."""
    state = session_start(_load_design(design_path))
    Path(state_path).write_text(session_to_json(state))
    _emit(_session_view(state))


@session.command("submit")
@click.option("--state", "state_path", required=True, type=click.Path(dir_okay=False))
@click.option("--results", required=True)
@_guarded
def session_submit_cmd(state_path: str, results: str) -> None:
    """Feed one round of results; prints the next round or the final result."""
    state = session_from_json(_read_file(state_path, "session state"))
    state = session_submit(state, parse_results(results))
    Path(state_path).write_text(session_to_json(state))
    _emit(_session_view(state))


@main.command("metrics")
@click.option("--design", "design_path", required=True, type=click.Path(dir_okay=False))
@click.option("--exact-budget", type=int, default=2_000_000, show_default=True)
@click.option("--mc-draws", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=_FORMATS, default="json", show_default=True)
@_guarded
def metrics_cmd(design_path: str, exact_budget: int, mc_draws: int, seed: int, fmt: str) -> None:
    """Worst-case metrics of a design document."""
    doc = _load_design(design_path)
    m = metrics(doc, enumeration_budget=exact_budget, mc_draws=mc_draws, seed=seed)
    method = doc.method if doc.method != "multidim" else f"multidim:{doc.params['dims']}"
    if fmt == "json":
        _emit({"method": method, "samples": doc.samples, "differentiate": doc.differentiate, **m.to_dict()})
        return
    headers = ["method", "S", "D", "tests_worst", "tests_per_sample", "steps_worst", "max_group_size", "exact"]
    row = [
        method,
        str(doc.samples),
        str(doc.differentiate),
        str(m.tests_worst),
        str(m.tests_per_sample),
        str(m.steps_worst),
        str(m.max_group_size),
        "true" if m.exact else "false",
    ]
    click.echo(_csv_text(headers, [row]) if fmt == "csv" else _table(headers, [row]))


def _compare_rows(report: dict) -> list[list[str]]:
    rows = []
    for row in report["rows"]:
        rows.append(
            [
                row["method"],
                str(row["tests_worst"]),
                f"{row['tests_per_sample']:.4f}",
                str(row["steps_worst"]),
                str(row["max_group_size"]),
                "true" if row["exact"] else "false",
                "; ".join(row["violations"]),
            ]
        )
    return rows


@main.command()
@click.option("--samples", type=int, required=True)
@click.option("--differentiate", type=int, default=1, show_default=True)
@click.option("--max-group-size", type=int, default=None)
@click.option("--max-steps", type=int, default=None)
@click.option("--format", "fmt", type=_FORMATS, default="table", show_default=True)
@_guarded
def compare(samples: int, differentiate: int, max_group_size: int | None, max_steps: int | None, fmt: str) -> None:
    """Compare every feasible method at one (samples, differentiate)."""
    report = compare_methods(samples, differentiate, max_group_size, max_steps)
    if fmt == "json":
        _emit(report)
        return
    headers = ["method", "tests_worst", "tests_per_sample", "steps_worst", "max_group_size", "exact", "violations"]
    rows = _compare_rows(report)
    click.echo(_csv_text(headers, rows) if fmt == "csv" else _table(headers, rows))
    for entry in report["infeasible"]:
        click.echo(f"infeasible: {entry['method']}: {entry['reason']}", err=True)


@main.command("error-rate")
@click.option("--samples", type=int, required=True)
@click.option("--prevalence", type=float, required=True)
@click.option("--differentiate", type=int, required=True)
@click.option("--splits", type=int, default=1, show_default=True)
@_guarded
def error_rate(samples: int, prevalence: float, differentiate: int, splits: int) -> None:
    """Probability that positives exceed the design capacity."""
    _emit(error_rate_report(samples, prevalence, differentiate, splits))


@main.command("recommend")
@click.option("--samples", type=int, required=True)
@click.option("--prevalence", type=float, required=True)
@click.option("--tolerance", type=float, required=True)
@click.option("--comparison/--no-comparison", default=True, show_default=True)
@_guarded
def recommend_cmd(samples: int, prevalence: float, tolerance: float, comparison: bool) -> None:
    """Smallest capacity and split count meeting an error tolerance."""
    _emit(recommend(samples, prevalence, tolerance, with_comparison=comparison))


@main.command("sweep")
@click.option("--manifest", "manifest_path", type=click.Path(dir_okay=False), default=None)
@click.option("--default-root", type=click.Path(file_okay=False), default=None, help="Run the built-in desk-scale manifest rooted here.")
@click.option("--init", "init_path", type=click.Path(dir_okay=False), default=None, help="With --default-root: write the manifest there and exit.")
@_guarded
def sweep_cmd(manifest_path: str | None, default_root: str | None, init_path: str | None) -> None:
    """Run a design sweep from a manifest."""
    if (manifest_path is None) == (default_root is None):
        raise BadInputError("give exactly one of --manifest or --default-root")
    if init_path is not None:
        if default_root is None:
            raise BadInputError("--init needs --default-root")
        Path(init_path).write_text(json.dumps(default_manifest(default_root), indent=2) + "\n")
        click.echo(f"wrote manifest to {init_path}", err=True)
        return
    source = manifest_path if manifest_path is not None else default_manifest(default_root)
    summary = run_sweep(source, progress=lambda msg: click.echo(msg, err=True))
    _emit(summary)


@main.command("export")
@click.option("--root", required=True, type=click.Path(file_okay=False))
@click.option("--differentiate", type=int, default=None)
@click.option("--methods", default=None, help="Comma-separated method filter.")
@click.option("--s-min", type=int, default=None)
@click.option("--s-max", type=int, default=None)
@click.option("--metric", default=None)
@click.option("--format", "fmt", type=_FORMATS, default="json", show_default=True)
@_guarded
def export(root: str, differentiate: int | None, methods: str | None, s_min: int | None, s_max: int | None, metric: str | None, fmt: str) -> None:
    """Plot-ready long-format table from a sweep store."""
    table = export_comparison(
        root,
        differentiate=differentiate,
        methods=[m.strip() for m in methods.split(",")] if methods else None,
        s_min=s_min,
        s_max=s_max,
        metric=metric,
    )
    if fmt == "json":
        _emit(table)
        return
    headers = list(table["columns"])
    rows = [[str(r[c]) for c in headers] for r in table["rows"]]
    click.echo(_csv_text(headers, rows) if fmt == "csv" else _table(headers, rows))
    for miss in table["missing"]:
        click.echo(
            f"missing: {miss['method']} S={miss['S']} D={miss['D']}: {miss['reason']}",
            err=True,
        )


@main.command()
@click.option("--port", type=int, default=None, help="Default 8090 or POOLDESIGN_PORT.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", type=click.Path(file_okay=False), default="pooldesign_data/sessions", show_default=True)
@click.option("--sweep-root", type=click.Path(file_okay=False), default=None)
@_guarded
def serve(port: int | None, host: str, store: str, sweep_root: str | None) -> None:
    """Start the local HTTP JSON service."""
    import os

    import uvicorn

    from .service import create_app

    if port is None:
        port = int(os.environ.get("POOLDESIGN_PORT", "8090"))
    app = create_app(Path(store), Path(sweep_root) if sweep_root else None)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
