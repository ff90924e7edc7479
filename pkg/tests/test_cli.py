from __future__ import annotations

import json
from pathlib import Path

from click.testing import CliRunner

from pooldesign import __version__
from pooldesign.cli import main
from pooldesign.constructors import build
from pooldesign.core import canonical_json, design_to_json
from pooldesign.evaluate import compare_methods
from pooldesign.prevalence import error_rate_report, recommend


def _run(runner: CliRunner, *args: str):
    return runner.invoke(main, list(args), catch_exceptions=False)


def _write_design(path: Path, method: str, samples: int, differentiate: int = 1) -> None:
    path.write_text(design_to_json(build(method, samples, differentiate)))


def test_version_flag() -> None:
    result = _run(CliRunner(), "--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_design_prints_canonical_document(tmp_path: Path) -> None:
    runner = CliRunner()
    result = _run(runner, "design", "--method", "cr", "--samples", "10", "--differentiate", "1")
    assert result.exit_code == 0
    assert result.output == design_to_json(build("cr", 10, 1))
    assert result.output.endswith("}\n")

    out = tmp_path / "design.json"
    result = _run(runner, "design", "--method", "matrix", "--samples", "36", "--out", str(out))
    assert result.exit_code == 0
    assert result.output == ""
    assert out.read_text() == design_to_json(build("matrix", 36, 1))


def test_design_multidim_takes_dims_option() -> None:
    result = _run(CliRunner(), "design", "--method", "multidim", "--samples", "27", "--dims", "3")
    doc = json.loads(result.output)
    assert doc["params"]["dims"] == 3
    assert doc["method"] == "multidim"


def test_design_error_exit_codes() -> None:
    runner = CliRunner()
    bad = runner.invoke(main, ["design", "--method", "nope", "--samples", "9"])
    assert bad.exit_code == 2
    assert bad.stdout == ""
    assert "error (bad_input)" in bad.stderr

    infeasible = runner.invoke(main, ["design", "--method", "std", "--samples", "4", "--differentiate", "4"])
    assert infeasible.exit_code == 3
    assert "error (infeasible)" in infeasible.stderr


def test_decode_resolves_and_flags_inconclusive(tmp_path: Path) -> None:
    runner = CliRunner()
    path = tmp_path / "cr.json"
    _write_design(path, "cr", 6)
    good = _run(runner, "decode", "--design", str(path), "--results", "10010")
    assert good.exit_code == 0
    doc = json.loads(good.output)
    assert doc["kind"] == "resolved"
    assert doc["positives"] == [4]

    mpath = tmp_path / "matrix.json"
    _write_design(mpath, "matrix", 9)
    contradictory = runner.invoke(main, ["decode", "--design", str(mpath), "--results", "100000"])
    assert contradictory.exit_code == 4
    assert json.loads(contradictory.output)["reason"] == "contradictory_results"


def test_decode_missing_design_file_exits_not_found(tmp_path: Path) -> None:
    result = CliRunner().invoke(main, ["decode", "--design", str(tmp_path / "gone.json"), "--results", "01"])
    assert result.exit_code == 5
    assert "error (not_found)" in result.stderr


def test_session_flow_hierarchical(tmp_path: Path) -> None:
    runner = CliRunner()
    design_path = tmp_path / "hier.json"
    state_path = tmp_path / "state.json"
    _write_design(design_path, "hierarchical", 36)

    started = _run(runner, "session", "new", "--design", str(design_path), "--state", str(state_path))
    assert started.exit_code == 0
    view = json.loads(started.output)
    assert view["status"] == "awaiting_results"
    assert view["version"] == 0
    assert [len(p) for p in view["pending_round"]["pools"]] == [12, 12, 12]

    # sample 17 sits in the middle third, then is isolated split by split
    for results, expect_status in (("010", "awaiting_results"), ("010", "awaiting_results"), ("10", "awaiting_results"), ("01", "finished")):
        step = _run(runner, "session", "submit", "--state", str(state_path), "--results", results)
        assert step.exit_code == 0
        view = json.loads(step.output)
        assert view["status"] == expect_status

    assert view["resolved_positives"] == [17]
    assert view["tests_used"] == 10
    assert view["rounds_used"] == 4

    done = runner.invoke(main, ["session", "submit", "--state", str(state_path), "--results", "0"])
    assert done.exit_code == 2


def test_metrics_formats(tmp_path: Path) -> None:
    runner = CliRunner()
    path = tmp_path / "matrix.json"
    _write_design(path, "matrix", 36)

    as_json = _run(runner, "metrics", "--design", str(path))
    doc = json.loads(as_json.output)
    assert doc == {
        "method": "matrix",
        "samples": 36,
        "differentiate": 1,
        "tests_worst": 12,
        "tests_per_sample": doc["tests_per_sample"],
        "steps_worst": 1,
        "max_group_size": 6,
        "exact": True,
    }

    as_csv = _run(runner, "metrics", "--design", str(path), "--format", "csv")
    lines = as_csv.output.splitlines()
    assert lines[0] == "method,S,D,tests_worst,tests_per_sample,steps_worst,max_group_size,exact"
    assert lines[1].startswith("matrix,36,1,12,")

    as_table = _run(runner, "metrics", "--design", str(path), "--format", "table")
    header, row = as_table.output.splitlines()
    assert header.split()[:3] == ["method", "S", "D"]
    assert row.split()[0] == "matrix"


def test_metrics_renders_multidim_spec(tmp_path: Path) -> None:
    path = tmp_path / "m4.json"
    _write_design(path, "multidim:4", 16)
    result = _run(CliRunner(), "metrics", "--design", str(path))
    assert json.loads(result.output)["method"] == "multidim:4"


def test_compare_json_matches_library(tmp_path: Path) -> None:
    result = _run(CliRunner(), "compare", "--samples", "36", "--differentiate", "1", "--format", "json")
    assert result.output == canonical_json(compare_methods(36, 1))


def test_compare_table_shows_violations_and_infeasible() -> None:
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["compare", "--samples", "36", "--max-group-size", "10", "--max-steps", "1"],
    )
    assert result.exit_code == 0
    table_lines = result.output.splitlines()
    assert table_lines[0].split()[:2] == ["method", "tests_worst"]
    binary_row = next(line for line in table_lines if line.startswith("binary"))
    assert "max group size 18 exceeds limit 10" in binary_row
    hier_row = next(line for line in table_lines if line.startswith("hierarchical"))
    assert "; steps 4 exceeds limit 1" in hier_row

    infeasible = runner.invoke(main, ["compare", "--samples", "4", "--differentiate", "4"])
    assert "infeasible: std:" in infeasible.stderr


def test_error_rate_matches_library() -> None:
    result = _run(
        CliRunner(),
        "error-rate", "--samples", "40", "--prevalence", "0.03", "--differentiate", "2",
    )
    assert result.output == canonical_json(error_rate_report(40, 0.03, 2, 1))


def test_recommend_matches_library() -> None:
    runner = CliRunner()
    with_table = _run(
        runner, "recommend", "--samples", "20", "--prevalence", "0.02", "--tolerance", "1e-3"
    )
    assert with_table.output == canonical_json(recommend(20, 0.02, 1e-3))
    bare = _run(
        runner,
        "recommend", "--samples", "20", "--prevalence", "0.02", "--tolerance", "1e-3",
        "--no-comparison",
    )
    doc = json.loads(bare.output)
    assert "comparison" not in doc
    assert doc["differentiate"] == 3


def test_sweep_init_writes_default_manifest(tmp_path: Path) -> None:
    manifest_path = tmp_path / "manifest.json"
    result = CliRunner().invoke(
        main,
        ["sweep", "--default-root", str(tmp_path / "out"), "--init", str(manifest_path)],
    )
    assert result.exit_code == 0
    assert f"wrote manifest to {manifest_path}" in result.stderr
    doc = json.loads(manifest_path.read_text())
    assert doc["output_root"] == str(tmp_path / "out")
    assert doc["d_values"] == [1, 2, 3, 4]
    assert manifest_path.read_text().endswith("\n")
    assert not (tmp_path / "out").exists()


def test_sweep_manifest_run_and_export(tmp_path: Path) -> None:
    runner = CliRunner()
    root = tmp_path / "out"
    manifest = {
        "methods": ["matrix", "binary", "cr"],
        "s_values": [9, 16],
        "d_values": [1],
        "output_root": str(root),
    }
    manifest_path = tmp_path / "mini.json"
    manifest_path.write_text(json.dumps(manifest))

    ran = _run(runner, "sweep", "--manifest", str(manifest_path))
    summary = json.loads(ran.output)
    assert summary == {
        "cells_total": 6,
        "built": 6,
        "skipped": 0,
        "feasible": 6,
        "infeasible": 0,
        "output_root": str(root),
    }

    exported = _run(
        runner,
        "export", "--root", str(root), "--differentiate", "1",
        "--methods", "matrix,binary", "--metric", "tests_worst",
    )
    table = json.loads(exported.output)
    assert {row["method"] for row in table["rows"]} == {"matrix", "binary"}
    assert all(row["metric"] == "tests_worst" for row in table["rows"])

    as_csv = _run(
        runner,
        "export", "--root", str(root), "--metric", "tests_worst", "--format", "csv",
    )
    assert as_csv.output.splitlines()[0] == "method,S,D,metric,value"


def test_sweep_flag_exclusivity(tmp_path: Path) -> None:
    runner = CliRunner()
    neither = runner.invoke(main, ["sweep"])
    assert neither.exit_code == 2
    assert "exactly one of" in neither.stderr
    both = runner.invoke(
        main,
        ["sweep", "--manifest", str(tmp_path / "m.json"), "--default-root", str(tmp_path / "r")],
    )
    assert both.exit_code == 2


def test_export_missing_root_exits_bad_input(tmp_path: Path) -> None:
    result = CliRunner().invoke(main, ["export", "--root", str(tmp_path / "none")])
    assert result.exit_code == 2
    assert "error (bad_input)" in result.stderr
