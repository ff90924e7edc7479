"""Record canonical HTTP responses from a live pooldesign service.

Starts `pooldesign serve` on a scratch port, walks the flows the UI
exercises, and freezes every request/response pair into
tests/fixtures/http.json.  The browser tests replay these bytes through a
fake fetch, so every number the UI renders originated from the real API.

Usage: python3 scripts/record_fixtures.py
"""
from __future__ import annotations

import json
import signal
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import httpx

PORT = 8123
BASE = f"http://127.0.0.1:{PORT}"
OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "http.json"


def wait_ready(client: httpx.Client) -> None:
    for _ in range(100):
        try:
            if client.get(f"{BASE}/api/health").status_code == 200:
                return
        except httpx.TransportError:
            time.sleep(0.1)
    raise RuntimeError("service never came up")


def entry(response: httpx.Response, request_body: dict | None = None) -> dict:
    doc = {"status": response.status_code, "response": response.json()}
    if request_body is not None:
        doc["request"] = request_body
    return doc


def record_session(client: httpx.Client, design: dict, submits: list[list[bool]],
                   stale_after: int | None = None) -> dict:
    created = client.post(f"{BASE}/api/session", json={"design": design})
    created.raise_for_status()
    scenario: dict = {
        "design": design,
        "create": entry(created),
        "submits": [],
        "stale": None,
    }
    session_id = created.json()["id"]
    version = 0
    for index, results in enumerate(submits):
        if stale_after is not None and index == stale_after:
            stale_body = {"results": results, "version": version - 1}
            stale = client.post(f"{BASE}/api/session/{session_id}/results", json=stale_body)
            assert stale.status_code == 400, stale.text
            scenario["stale"] = entry(stale, stale_body)
        body = {"results": results, "version": version}
        submitted = client.post(f"{BASE}/api/session/{session_id}/results", json=body)
        submitted.raise_for_status()
        scenario["submits"].append(entry(submitted, body))
        version = submitted.json()["version"]
    return scenario


def main() -> int:
    store = tempfile.mkdtemp(prefix="pooldesign_record_")
    server = subprocess.Popen(
        [sys.executable, "-m", "pooldesign.cli", "serve", "--port", str(PORT), "--store", store],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        with httpx.Client(timeout=600.0) as client:
            wait_ready(client)
            fixtures: dict = {}
            fixtures["health"] = entry(client.get(f"{BASE}/api/health"))
            fixtures["methods"] = entry(client.get(f"{BASE}/api/methods"))

            fixtures["recommend"] = []
            for body in (
                {"samples": 500, "prevalence": 0.001, "tolerance": 0.1},
                {"samples": 100, "prevalence": 0.02, "tolerance": 0.001},
                {"samples": 100, "prevalence": 0.2, "tolerance": 0.01},
            ):
                response = client.post(f"{BASE}/api/recommend", json=body)
                response.raise_for_status()
                fixtures["recommend"].append(entry(response, body))

            fixtures["design"] = []
            designs: dict[str, dict] = {}
            for body in (
                {"method": "binary", "samples": 500, "differentiate": 1},
                {"method": "hierarchical", "samples": 36, "differentiate": 1},
                {"method": "matrix", "samples": 36, "differentiate": 1},
                {"method": "matrix", "samples": 9, "differentiate": 1},
            ):
                response = client.post(f"{BASE}/api/design", json=body)
                response.raise_for_status()
                fixtures["design"].append(entry(response, body))
                designs[f"{body['method']}{body['samples']}"] = response.json()

            false, true = False, True
            fixtures["sessions"] = [
                record_session(
                    client,
                    designs["hierarchical36"],
                    [[false, true, false], [false, true, false], [true, false], [false, true]],
                    stale_after=1,
                ),
                record_session(client, designs["matrix36"], [[false] * 12]),
                record_session(client, designs["matrix9"], [[true, false, false, false, false, false]]),
            ]

        OUT.parent.mkdir(parents=True, exist_ok=True)
        OUT.write_text(json.dumps(fixtures, indent=1, sort_keys=True) + "\n")

        walkthrough = fixtures["sessions"][0]
        final = walkthrough["submits"][-1]["response"]
        plan = fixtures["recommend"][0]["response"]
        rows = {row["method"]: row for row in plan["comparison"]["rows"]}
        print("walkthrough final:", final["status"], final["resolved_positives"],
              "version", final["version"])
        print("stale message:", walkthrough["stale"]["response"]["error"]["message"])
        print("recommend500:", plan["differentiate"], plan["splits"], plan["part_samples"])
        print("binary row:", rows["binary"]["tests_worst"], rows["binary"]["max_group_size"])
        print("tests order:", sorted(rows, key=lambda m: (rows[m]["tests_worst"], m))[:3])
        print("refused note:", fixtures["recommend"][2]["response"]["note"])
        print("contradictory:", fixtures["sessions"][2]["submits"][0]["response"]["failure_reason"])
        print("all-negative:", fixtures["sessions"][1]["submits"][0]["response"]["resolved_positives"])
        print("wrote", OUT)
        return 0
    finally:
        server.send_signal(signal.SIGINT)
        try:
            server.wait(timeout=10)
        except subprocess.TimeoutExpired:
            server.kill()


if __name__ == "__main__":
    raise SystemExit(main())
