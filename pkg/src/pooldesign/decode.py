"""Turning pool readouts into positives.

Elimination first: a sample in any negative pool is cleared; survivors that
were pooled at all are the candidates.  The readout is then explained by
counting candidate subsets of size <= D whose pools are exactly the positive
pools.  One explanation resolves the round, several trigger individual
retests, none means the readout contradicts the design or exceeds its
capacity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Design, Round, make_round
from .errors import BadInputError

DECODE_BUDGET = 1_000_000

RESOLVED = "resolved"
NEXT_ROUND = "next_round"
INCONCLUSIVE = "inconclusive"

EXCEEDS = "exceeds_differentiate"
CONTRADICTORY = "contradictory_results"


@dataclass(frozen=True)
class DecodeOutcome:
    kind: str
    candidates: tuple[int, ...]
    positives: tuple[int, ...] | None = None
    next_round: Round | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        doc: dict = {"kind": self.kind, "candidates": list(self.candidates)}
        if self.kind == RESOLVED:
            doc["positives"] = list(self.positives or ())
        if self.kind == NEXT_ROUND and self.next_round is not None:
            doc["next_round"] = {
                "round_index": self.next_round.round_index,
                "pools": [list(p) for p in self.next_round.pools],
            }
        if self.kind == INCONCLUSIVE:
            doc["reason"] = self.reason
        return doc


def simulate(rnd: Round, positives: Iterable[int]) -> list[bool]:
    """Ideal readout: a pool is positive iff it holds a positive sample."""
    pos = set(positives)
    return [bool(pos.intersection(pool)) for pool in rnd.pools]


def parse_results(text: str) -> list[bool]:
    """Readout string: one 0/1 or -/+ character per pool."""
    mapping = {"0": False, "-": False, "1": True, "+": True}
    out = []
    for ch in text.strip():
        if ch in ",; \t":
            continue
        if ch not in mapping:
            raise BadInputError(f"unexpected result character {ch!r}; use 0/1 or -/+")
        out.append(mapping[ch])
    return out


def _count_explanations(
    pool_candidates: dict[int, tuple[int, ...]],
    codes: dict[int, int],
    pattern: int,
    dmax: int,
    candidate_count: int,
    budget: int,
) -> tuple[int, tuple[int, ...] | None] | None:
    """Count subsets of candidates (size <= dmax) whose pools are exactly the
    positive pattern, stopping at two.  Returns None when the node budget is
    exhausted (caller falls back to a retest round)."""
    nodes = 0

    def covers_from(covered: int, chosen: tuple[int, ...], banned: frozenset[int]):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            return None
        if covered == pattern:
            if len(chosen) < dmax and candidate_count > len(chosen):
                # any further candidate extends this explanation to a second one
                return 2, chosen
            return 1, chosen
        if len(chosen) == dmax:
            return 0, None
        # branch on the uncovered pool with the fewest usable candidates
        best_bit = -1
        best_opts: tuple[int, ...] | None = None
        probe = covered ^ pattern
        while probe:
            bit = probe & (-probe)
            probe ^= bit
            opts = tuple(
                c for c in pool_candidates[bit] if c not in banned and c not in chosen
            )
            if not opts:
                return 0, None
            if best_opts is None or len(opts) < len(best_opts):
                best_bit, best_opts = bit, opts
                if len(opts) == 1:
                    break
        assert best_opts is not None
        total = 0
        witness = None
        blocked = set()
        for c in best_opts:
            got = covers_from(covered | codes[c], chosen + (c,), banned | frozenset(blocked))
            if got is None:
                return None
            count, found = got
            if count and witness is None:
                witness = found
            total += count
            if total >= 2:
                return 2, witness
            blocked.add(c)
        return total, witness

    return covers_from(0, (), frozenset())


def decode_round(design: Design, rnd: Round, results: Sequence[bool], budget: int = DECODE_BUDGET) -> DecodeOutcome:
    if len(results) != len(rnd.pools):
        raise BadInputError(
            f"expected {len(rnd.pools)} pool results, got {len(results)}"
        )
    dmax = design.differentiate

    codes: dict[int, int] = {}
    for w, pool in enumerate(rnd.pools):
        for s in pool:
            codes[s] = codes.get(s, 0) | (1 << w)

    pattern = 0
    for w, positive in enumerate(results):
        if positive:
            pattern |= 1 << w

    if pattern == 0:
        return DecodeOutcome(kind=RESOLVED, candidates=(), positives=())

    candidates = tuple(sorted(s for s, code in codes.items() if code & ~pattern == 0))
    union = 0
    for s in candidates:
        union |= codes[s]
    if union != pattern:
        return DecodeOutcome(kind=INCONCLUSIVE, candidates=candidates, reason=CONTRADICTORY)

    # samples that privately explain some positive pool appear in every explanation
    pool_candidates: dict[int, tuple[int, ...]] = {}
    probe = pattern
    while probe:
        bit = probe & (-probe)
        probe ^= bit
        pool_candidates[bit] = tuple(s for s in candidates if codes[s] & bit)
    forced = sorted({opts[0] for opts in pool_candidates.values() if len(opts) == 1})

    if len(forced) > dmax:
        return DecodeOutcome(kind=INCONCLUSIVE, candidates=candidates, reason=EXCEEDS)

    retest = make_round(rnd.round_index + 1, [[c] for c in candidates])
    forced_union = 0
    for s in forced:
        forced_union |= codes[s]
    if forced_union == pattern:
        if len(forced) == dmax or len(forced) == len(candidates):
            return DecodeOutcome(kind=RESOLVED, candidates=candidates, positives=tuple(forced))
        return DecodeOutcome(kind=NEXT_ROUND, candidates=candidates, next_round=retest)

    if _subset_count_bound(len(candidates), dmax) > budget:
        return DecodeOutcome(kind=NEXT_ROUND, candidates=candidates, next_round=retest)

    counted = _count_explanations(
        pool_candidates, codes, pattern, dmax, len(candidates), budget
    )
    if counted is None:
        return DecodeOutcome(kind=NEXT_ROUND, candidates=candidates, next_round=retest)
    count, witness = counted
    if count == 0:
        return DecodeOutcome(kind=INCONCLUSIVE, candidates=candidates, reason=EXCEEDS)
    if count == 1:
        assert witness is not None
        return DecodeOutcome(
            kind=RESOLVED, candidates=candidates, positives=tuple(sorted(witness))
        )
    return DecodeOutcome(kind=NEXT_ROUND, candidates=candidates, next_round=retest)


def _subset_count_bound(n: int, dmax: int) -> int:
    return sum(math.comb(n, d) for d in range(1, min(n, dmax) + 1))
