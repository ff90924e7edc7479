"""Local HTTP JSON service for the CLI's functionality plus session hosting.

Responses are rendered with the same canonical JSON writer as the CLI.
Sessions live as individual documents on disk, keyed by a content-addressed
id, so restarting the service loses nothing.  Mutations are serialized per
session id; everything else is stateless.
"""
from __future__ import annotations

import hashlib
import json
import threading
import uuid
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .constructors import build
from .core import (
    METHOD_ADAPTIVITY,
    canonical_json,
    design_from_dict,
    design_to_dict,
    design_to_json,
    make_round,
)
from .decode import decode_round, parse_results
from .errors import BadInputError, NotFoundError, PoolDesignError
from .prevalence import error_rate_report, recommend
from .session import session_from_dict, session_start, session_submit, session_to_dict
from .sweep import export_comparison

DEFAULT_PORT = 8090
_LOCALHOST = r"^https?://(localhost|127\.0\.0\.1)(:\d+)?$"


def _json(payload: dict, status: int = 200) -> Response:
    return Response(canonical_json(payload), status_code=status, media_type="application/json")


def _field(payload: dict, name: str, kind, required: bool = True, default=None):
    if name not in payload or payload[name] is None:
        if required:
            raise BadInputError(f"missing field {name!r}")
        return default
    try:
        return kind(payload[name])
    except (TypeError, ValueError) as exc:
        raise BadInputError(f"field {name!r}: {exc}") from exc


def _parse_results_field(raw) -> list[bool]:
    if isinstance(raw, str):
        return parse_results(raw)
    if isinstance(raw, list):
        return [bool(x) for x in raw]
    raise BadInputError("results must be a string or a list of booleans")


class SessionStore:
    """One JSON document per session under a directory, single writer per id."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: defaultdict[str, threading.Lock] = defaultdict(threading.Lock)
        self._registry = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry:
            return self._locks[session_id]

    def _path(self, session_id: str) -> Path:
        if not session_id.isalnum():
            raise BadInputError("malformed session id")
        return self.root / f"{session_id}.json"

    def create(self, design) -> tuple[str, dict]:
        state = session_start(design)
        nonce = uuid.uuid4().hex
        digest = hashlib.sha256((design_to_json(design) + nonce).encode()).hexdigest()
        session_id = digest[:24]
        doc = session_to_dict(state)
        self._path(session_id).write_text(canonical_json(doc))
        return session_id, doc

    def load(self, session_id: str) -> dict:
        path = self._path(session_id)
        if not path.exists():
            raise NotFoundError(f"no session {session_id!r}")
        return json.loads(path.read_text())

    def submit(self, session_id: str, results: list[bool], seen_version: int | None) -> dict:
        with self._lock(session_id):
            state = session_from_dict(self.load(session_id))
            if seen_version is not None and seen_version != state.version:
                raise BadInputError(
                    f"stale session state: server is at version {state.version}, "
                    f"request was built against {seen_version}"
                )
            state = session_submit(state, results)
            doc = session_to_dict(state)
            self._path(session_id).write_text(canonical_json(doc))
            return doc


def create_app(session_root: Path, sweep_root: Path | None = None) -> FastAPI:
    app = FastAPI(title="pooldesign", version=__version__, docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=_LOCALHOST,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(session_root)

    @app.exception_handler(PoolDesignError)
    async def _domain_error(_request: Request, exc: PoolDesignError) -> Response:
        payload = {"error": {"code": exc.kind.value, "message": str(exc), "details": {}}}
        return _json(payload, status=exc.http_status)

    @app.exception_handler(RequestValidationError)
    async def _body_error(_request: Request, exc: RequestValidationError) -> Response:
        payload = {"error": {"code": "bad_input", "message": "malformed request body", "details": {}}}
        return _json(payload, status=400)

    @app.get("/api/health")
    def health() -> Response:
        return _json({"status": "ok", "version": __version__})

    @app.get("/api/methods")
    def methods() -> Response:
        fixed = {"cr_special2": 2, "cr_special3": 3}
        entries = [
            {
                "method": name,
                "adaptivity": adaptivity.value,
                "fixed_differentiate": fixed.get(name),
            }
            for name, adaptivity in METHOD_ADAPTIVITY.items()
        ]
        return _json({"methods": entries})

    @app.post("/api/design")
    def design_endpoint(payload: dict) -> Response:
        built = build(
            _field(payload, "method", str),
            _field(payload, "samples", int),
            _field(payload, "differentiate", int, required=False, default=1),
            seed=_field(payload, "seed", int, required=False, default=0),
            dims=_field(payload, "dims", int, required=False),
        )
        return _json(design_to_dict(built))

    @app.post("/api/decode")
    def decode_endpoint(payload: dict) -> Response:
        if "design" not in payload or not isinstance(payload["design"], dict):
            raise BadInputError("missing design document")
        design = design_from_dict(payload["design"])
        results = _parse_results_field(payload.get("results"))
        rnd = design.rounds[0]
        if "pools" in payload:
            pools = payload["pools"]
            if not isinstance(pools, list):
                raise BadInputError("pools must be a list of sample lists")
            rnd = make_round(_field(payload, "round_index", int, required=False, default=0), pools)
        return _json(decode_round(design, rnd, results).to_dict())

    @app.post("/api/session")
    def session_create(payload: dict) -> Response:
        if "design" not in payload or not isinstance(payload["design"], dict):
            raise BadInputError("missing design document")
        design = design_from_dict(payload["design"])
        session_id, doc = store.create(design)
        return _json({"id": session_id, **doc})

    @app.get("/api/session/{session_id}")
    def session_get(session_id: str) -> Response:
        return _json({"id": session_id, **store.load(session_id)})

    @app.post("/api/session/{session_id}/results")
    def session_results(session_id: str, payload: dict) -> Response:
        results = _parse_results_field(payload.get("results"))
        seen = _field(payload, "version", int, required=False)
        doc = store.submit(session_id, results, seen)
        return _json({"id": session_id, **doc})

    @app.post("/api/error-rate")
    def error_rate_endpoint(payload: dict) -> Response:
        return _json(
            error_rate_report(
                _field(payload, "samples", int),
                _field(payload, "prevalence", float),
                _field(payload, "differentiate", int),
                _field(payload, "splits", int, required=False, default=1),
            )
        )

    @app.post("/api/recommend")
    def recommend_endpoint(payload: dict) -> Response:
        return _json(
            recommend(
                _field(payload, "samples", int),
                _field(payload, "prevalence", float),
                _field(payload, "tolerance", float),
                with_comparison=bool(payload.get("comparison", True)),
            )
        )

    @app.get("/api/sweep")
    def sweep_endpoint(
        differentiate: int | None = None,
        methods: str | None = None,
        s_min: int | None = None,
        s_max: int | None = None,
        metric: str | None = None,
    ) -> Response:
        if sweep_root is None:
            raise NotFoundError("no sweep store configured; start with --sweep-root")
        return _json(
            export_comparison(
                sweep_root,
                differentiate=differentiate,
                methods=[m.strip() for m in methods.split(",")] if methods else None,
                s_min=s_min,
                s_max=s_max,
                metric=metric,
            )
        )

    return app
