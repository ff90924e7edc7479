"""Core model: pooling designs, rounds, adaptivity classes, canonical JSON.

A design assigns each of S samples to one or more of W pools; reading the
pools (positive / negative) then narrows down which samples are positive.
Samples and pools are 0-based indices.  A design may span several rounds:
round 0 is fixed up front, later rounds exist only for adaptive schemes and
are appended as a session unfolds.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BadInputError

SCHEMA_VERSION = "1"


class Adaptivity(str, Enum):
    NON_ADAPTIVE = "non_adaptive"
    SEMI_ADAPTIVE = "semi_adaptive"
    STRICTLY_ADAPTIVE = "strictly_adaptive"


# Which follow-up behaviour each construction method commits to:
#   non_adaptive      one round, decoded in a single shot
#   semi_adaptive     one designed round, plus at most one round of
#                     individual retests when the pattern is ambiguous
#   strictly_adaptive every round is planned from the previous readout
METHOD_ADAPTIVITY: dict[str, Adaptivity] = {
    "matrix": Adaptivity.SEMI_ADAPTIVE,
    "multidim": Adaptivity.SEMI_ADAPTIVE,
    "binary": Adaptivity.SEMI_ADAPTIVE,
    "random": Adaptivity.SEMI_ADAPTIVE,
    "hierarchical": Adaptivity.STRICTLY_ADAPTIVE,
    "std": Adaptivity.NON_ADAPTIVE,
    "cr": Adaptivity.NON_ADAPTIVE,
    "cr_backtrack": Adaptivity.NON_ADAPTIVE,
    "cr_special2": Adaptivity.NON_ADAPTIVE,
    "cr_special3": Adaptivity.NON_ADAPTIVE,
}

METHOD_NAMES: tuple[str, ...] = tuple(METHOD_ADAPTIVITY)


@dataclass(frozen=True)
class Round:
    """One batch of pools tested together."""

    round_index: int
    pools: tuple[tuple[int, ...], ...]

    @property
    def width(self) -> int:
        return len(self.pools)


@dataclass(frozen=True)
class Design:
    method: str
    samples: int
    differentiate: int
    params: Mapping[str, object] = field(default_factory=dict)
    rounds: tuple[Round, ...] = ()

    @property
    def adaptivity(self) -> Adaptivity:
        return METHOD_ADAPTIVITY[self.method]

    @property
    def width(self) -> int:
        """Number of pools in the up-front round."""
        return self.rounds[0].width if self.rounds else 0

    def pools_of_sample(self, sample: int, round_index: int = 0) -> tuple[int, ...]:
        """Indices of the pools in the given round that contain `sample`."""
        rnd = self.rounds[round_index]
        return tuple(w for w, pool in enumerate(rnd.pools) if sample in pool)

    def samples_of_pool(self, pool: int, round_index: int = 0) -> tuple[int, ...]:
        return self.rounds[round_index].pools[pool]


def make_round(round_index: int, pools: Iterable[Iterable[int]]) -> Round:
    """Normalize pool contents: sorted, duplicate-free sample tuples."""
    normalized = tuple(tuple(sorted(set(map(int, pool)))) for pool in pools)
    return Round(round_index=round_index, pools=normalized)


def make_design(
    method: str,
    samples: int,
    differentiate: int,
    params: Mapping[str, object],
    pools: Iterable[Iterable[int]],
) -> Design:
    design = Design(
        method=method,
        samples=samples,
        differentiate=differentiate,
        params=dict(params),
        rounds=(make_round(0, pools),),
    )
    validate_design(design)
    return design


def validate_design(design: Design) -> None:
    """Check structural invariants.

    Every sample must appear in at least one round-0 pool, otherwise a
    negative readout could never clear it.  Pools may be empty: layered
    residue constructions produce index patterns that no sample matches,
    and those pools simply always read negative.
    """
    if design.method not in METHOD_ADAPTIVITY:
        raise BadInputError(f"unknown method {design.method!r}")
    if design.samples < 1:
        raise BadInputError("samples must be >= 1")
    if design.differentiate < 1:
        raise BadInputError("differentiate must be >= 1")
    if not design.rounds:
        raise BadInputError("design has no rounds")
    seen = set()
    for rnd_pos, rnd in enumerate(design.rounds):
        if rnd.round_index != rnd_pos:
            raise BadInputError("round indices must be consecutive from 0")
        for pool in rnd.pools:
            for s in pool:
                if not 0 <= s < design.samples:
                    raise BadInputError(f"sample {s} out of range 0..{design.samples - 1}")
            seen.update(pool)
    covered = set()
    for pool in design.rounds[0].pools:
        covered.update(pool)
    missing = [s for s in range(design.samples) if s not in covered]
    if missing:
        raise BadInputError(f"samples never pooled in round 0: {missing[:5]}")


def membership_matrix(design: Design, round_index: int = 0) -> np.ndarray:
    """Boolean (W, S) matrix: entry [w, s] is True when pool w holds sample s."""
    rnd = design.rounds[round_index]
    mat = np.zeros((len(rnd.pools), design.samples), dtype=bool)
    for w, pool in enumerate(rnd.pools):
        if pool:
            mat[w, list(pool)] = True
    return mat


def packed_sample_codes(design: Design, round_index: int = 0) -> np.ndarray:
    """Per-sample pool membership packed into uint64 lanes.

    Returns an (S, ceil(W/64)) array; lane k bit b is set when the sample
    sits in pool 64*k + b.  Unions of these codes are pool readout patterns,
    which makes subset enumeration a few vector ops.
    """
    rnd = design.rounds[round_index]
    w_count = len(rnd.pools)
    lanes = max(1, -(-w_count // 64))
    codes = np.zeros((design.samples, lanes), dtype=np.uint64)
    for w, pool in enumerate(rnd.pools):
        if pool:
            codes[list(pool), w // 64] |= np.uint64(1 << (w % 64))
    return codes


def _design_payload(design: Design) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": design.method,
        "samples": design.samples,
        "differentiate": design.differentiate,
        "adaptivity": design.adaptivity.value,
        "params": {k: design.params[k] for k in sorted(design.params)},
        "rounds": [
            {"round_index": rnd.round_index, "pools": [list(p) for p in rnd.pools]}
            for rnd in design.rounds
        ],
    }


def canonical_json(payload: Mapping[str, object]) -> str:
    """Compact single-line JSON with a trailing newline.

    Key order is whatever the payload dict carries, so builders are in
    charge of producing a stable ordering; byte-identical reruns depend
    on it.
    """
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False) + "\n"


def design_to_json(design: Design) -> str:
    return canonical_json(_design_payload(design))


def design_to_dict(design: Design) -> dict:
    return _design_payload(design)


def design_from_dict(doc: Mapping[str, object]) -> Design:
    try:
        if str(doc.get("schema_version")) != SCHEMA_VERSION:
            raise BadInputError(f"unsupported schema_version {doc.get('schema_version')!r}")
        method = str(doc["method"])
        samples = int(doc["samples"])  # type: ignore[arg-type]
        differentiate = int(doc["differentiate"])  # type: ignore[arg-type]
        params = dict(doc.get("params", {}))  # type: ignore[arg-type]
        rounds_doc: Sequence[Mapping[str, object]] = doc["rounds"]  # type: ignore[assignment]
        rounds = tuple(
            make_round(int(r["round_index"]), r["pools"])  # type: ignore[arg-type,index]
            for r in rounds_doc
        )
    except BadInputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise BadInputError(f"malformed design document: {exc}") from exc
    design = Design(
        method=method,
        samples=samples,
        differentiate=differentiate,
        params=params,
        rounds=rounds,
    )
    validate_design(design)
    if doc.get("adaptivity") != design.adaptivity.value:
        raise BadInputError("adaptivity field does not match the method")
    return design


def design_from_json(text: str) -> Design:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInputError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise BadInputError("design document must be a JSON object")
    return design_from_dict(doc)
