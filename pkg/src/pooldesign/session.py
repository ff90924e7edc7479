"""Multi-round testing sessions.

A session walks one design through rounds of real-world pool results until
the positives are pinned down or the readout falls outside the design's
guarantee.  State is an immutable value rebuilt from (design, history) by
replay, so persisted sessions resume exactly and submissions are idempotent
to re-derive.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .core import (
    Adaptivity,
    Design,
    Round,
    SCHEMA_VERSION,
    canonical_json,
    design_from_dict,
    design_to_dict,
    make_round,
)
from .constructors.hierarchy import split_slices
from .decode import (
    CONTRADICTORY,
    EXCEEDS,
    INCONCLUSIVE,
    NEXT_ROUND,
    RESOLVED,
    decode_round,
)
from .errors import BadInputError, InternalError

AWAITING = "awaiting_results"
FINISHED = "finished"
FAILED = "failed"


@dataclass(frozen=True)
class SessionState:
    design: Design
    history: tuple[tuple[Round, tuple[bool, ...]], ...]
    status: str
    pending_round: Round | None
    resolved_positives: tuple[int, ...] | None = None
    failure_reason: str | None = None

    @property
    def version(self) -> int:
        return len(self.history)

    @property
    def tests_used(self) -> int:
        return sum(len(rnd.pools) for rnd, _ in self.history)

    @property
    def rounds_used(self) -> int:
        return len(self.history)


def session_start(design: Design) -> SessionState:
    return SessionState(
        design=design,
        history=(),
        status=AWAITING,
        pending_round=design.rounds[0],
    )


def session_submit(state: SessionState, results: Sequence[bool]) -> SessionState:
    if state.status != AWAITING or state.pending_round is None:
        raise BadInputError(f"session is {state.status}; no results expected")
    pending = state.pending_round
    if len(results) != len(pending.pools):
        raise BadInputError(
            f"round {pending.round_index} has {len(pending.pools)} pools, got {len(results)} results"
        )
    outcomes = tuple(bool(r) for r in results)
    history = state.history + ((pending, outcomes),)
    base = replace(state, history=history, pending_round=None)

    if state.design.adaptivity is Adaptivity.STRICTLY_ADAPTIVE:
        return _advance_adaptive(base)
    if state.design.adaptivity is Adaptivity.SEMI_ADAPTIVE and pending.round_index > 0:
        return _finish_validation(base, pending, outcomes)
    return _decode_once(base, pending, outcomes)


def _finished(base: SessionState, positives: Sequence[int]) -> SessionState:
    positives = tuple(sorted(positives))
    if len(positives) > base.design.differentiate:
        return replace(base, status=FAILED, failure_reason=EXCEEDS)
    return replace(base, status=FINISHED, resolved_positives=positives)


def _decode_once(base: SessionState, rnd: Round, outcomes: tuple[bool, ...]) -> SessionState:
    outcome = decode_round(base.design, rnd, outcomes)
    if outcome.kind == RESOLVED:
        return _finished(base, outcome.positives or ())
    if outcome.kind == INCONCLUSIVE:
        return replace(base, status=FAILED, failure_reason=outcome.reason)
    if base.design.adaptivity is Adaptivity.NON_ADAPTIVE:
        # a one-round design read ambiguously: more positives than it resolves
        return replace(base, status=FAILED, failure_reason=EXCEEDS)
    return replace(base, status=AWAITING, pending_round=outcome.next_round)


def _finish_validation(base: SessionState, rnd: Round, outcomes: tuple[bool, ...]) -> SessionState:
    positives = [pool[0] for pool, hit in zip(rnd.pools, outcomes) if hit]
    return _finished(base, positives)


def _hier_policy(design: Design) -> dict[tuple[int, int], int]:
    table = design.params.get("policy")
    if not isinstance(table, (list, tuple)):
        raise BadInputError("hierarchical design params lack a policy table")
    return {(int(n), int(b)): int(k) for n, b, k in table}


def _advance_adaptive(base: SessionState) -> SessionState:
    """Replay the whole history through the split policy."""
    design = base.design
    policy = _hier_policy(design)
    dmax = design.differentiate

    resolved: list[int] = []
    # parent waves: (budget, pools belonging to that parent)
    waves: list[tuple[int, list[tuple[int, ...]]]] = [
        (min(dmax, design.samples), list(design.rounds[0].pools))
    ]
    pending: Round | None = design.rounds[0]

    for rnd, outcomes in base.history:
        if pending is None or rnd.round_index != pending.round_index:
            raise InternalError("session history does not match the replayed rounds")
        flat = [pool for _, pools in waves for pool in pools]
        if list(rnd.pools) != flat:
            raise InternalError("session history does not match the replayed pools")

        next_waves: list[tuple[int, list[tuple[int, ...]]]] = []
        at = 0
        for budget, pools in waves:
            hits = [pool for off, pool in enumerate(pools) if outcomes[at + off]]
            at += len(pools)
            if len(hits) > budget:
                return replace(base, status=FAILED, failure_reason=EXCEEDS)
            child_budget = budget - len(hits) + 1
            for pool in hits:
                if len(pool) == 1:
                    resolved.append(pool[0])
                else:
                    b = min(len(pool), child_budget)
                    arity = policy.get((len(pool), b))
                    if arity is None:
                        raise InternalError(
                            f"no split policy for group of {len(pool)} under bound {b}"
                        )
                    next_waves.append((b, split_slices(pool, arity)))

        if len(resolved) + len(next_waves) > dmax:
            return replace(base, status=FAILED, failure_reason=EXCEEDS)
        if next_waves:
            pools = [pool for _, pools in next_waves for pool in pools]
            pending = make_round(rnd.round_index + 1, pools)
            waves = next_waves
        else:
            pending = None
            waves = []

    if pending is None:
        return _finished(base, resolved)
    return replace(base, status=AWAITING, pending_round=pending)


# -- session documents ------------------------------------------------------


def session_to_dict(state: SessionState) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "design": design_to_dict(state.design),
        "history": [
            {"round_index": rnd.round_index, "outcomes": list(outcomes)}
            for rnd, outcomes in state.history
        ],
        "status": state.status,
        "resolved_positives": (
            list(state.resolved_positives) if state.resolved_positives is not None else None
        ),
        "failure_reason": state.failure_reason,
        "pending_round": (
            {
                "round_index": state.pending_round.round_index,
                "pools": [list(p) for p in state.pending_round.pools],
            }
            if state.pending_round is not None
            else None
        ),
        "version": state.version,
    }


def session_to_json(state: SessionState) -> str:
    return canonical_json(session_to_dict(state))


def session_from_dict(doc: Mapping[str, object]) -> SessionState:
    if str(doc.get("schema_version")) != SCHEMA_VERSION:
        raise BadInputError(f"unsupported schema_version {doc.get('schema_version')!r}")
    try:
        design = design_from_dict(doc["design"])  # type: ignore[arg-type]
        rounds: Sequence[Mapping[str, object]] = doc.get("history", [])  # type: ignore[assignment]
        outcome_lists = [
            [bool(x) for x in r["outcomes"]]  # type: ignore[index]
            for r in rounds
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise BadInputError(f"malformed session document: {exc}") from exc
    state = session_start(design)
    for outcomes in outcome_lists:
        state = session_submit(state, outcomes)
    return state


def session_from_json(text: str) -> SessionState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInputError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise BadInputError("session document must be a JSON object")
    return session_from_dict(doc)
