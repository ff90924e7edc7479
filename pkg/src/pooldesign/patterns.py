"""Vectorized readout-pattern analysis for one-round pool designs.

Each sample gets a code: the bitmask of round-0 pools containing it (pool w
= bit w).  The readout pattern of a positive set is the union of its codes.
A pattern is ambiguous when two different sets of at most D samples produce
it; the decoder then falls back to individually retesting every candidate
(every sample whose code is inside the pattern).

Everything here works on uint64 codes, which covers every one-round design
this package evaluates exhaustively (their pool counts stay under 64).
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

_CHUNK = 8192


def total_subsets(samples: int, dmax: int) -> int:
    """Number of nonempty positive sets of size <= dmax."""
    return sum(math.comb(samples, d) for d in range(1, min(samples, dmax) + 1))


def _expand_combinations(idx: np.ndarray, samples: int) -> np.ndarray:
    """Grow size-(d-1) combination rows by every valid next index."""
    last = idx[:, -1].astype(np.int64)
    counts = samples - 1 - last
    keep = counts > 0
    idx = idx[keep]
    counts = counts[keep]
    total = int(counts.sum())
    rep = np.repeat(np.arange(idx.shape[0]), counts)
    ends = np.cumsum(counts)
    offsets = np.arange(total) - np.repeat(ends - counts, counts)
    new_last = np.repeat(idx[:, -1] + 1, counts) + offsets
    return np.concatenate([idx[rep], new_last[:, None].astype(np.int32)], axis=1)


@lru_cache(maxsize=4)
def comb_indices(samples: int, d: int) -> np.ndarray:
    """All size-d index combinations from range(samples), lexicographic."""
    if d < 1 or d > samples:
        return np.empty((0, max(d, 1)), dtype=np.int32)
    idx = np.arange(samples, dtype=np.int32)[:, None]
    for _ in range(d - 1):
        idx = _expand_combinations(idx, samples)
    return idx


def pack_codes(pools: list[tuple[int, ...]], samples: int) -> np.ndarray:
    """Sample codes (uint64 bitmasks) from a pool list; needs <= 64 pools."""
    if len(pools) > 64:
        raise ValueError("pattern engine is limited to 64 pools")
    codes = np.zeros(samples, dtype=np.uint64)
    for w, pool in enumerate(pools):
        if pool:
            codes[list(pool)] |= np.uint64(1 << w)
    return codes


def subset_patterns(codes: np.ndarray, d: int) -> np.ndarray:
    """Readout pattern of every size-d subset."""
    idx = comb_indices(codes.shape[0], d)
    pats = codes[idx[:, 0]]
    for col in range(1, d):
        pats = pats | codes[idx[:, col]]
    return pats


def ambiguous_values(patterns: np.ndarray) -> np.ndarray:
    """Pattern values hit by at least two of the given subsets."""
    pats = np.sort(patterns)
    dup = pats[1:][pats[1:] == pats[:-1]]
    return np.unique(dup) if dup.size else dup


def candidate_counts(codes: np.ndarray, values: np.ndarray) -> np.ndarray:
    """For each pattern value, how many samples' codes sit inside it."""
    out = np.empty(values.shape[0], dtype=np.int64)
    for at in range(0, values.shape[0], _CHUNK):
        block = values[at : at + _CHUNK]
        inside = (codes[None, :] & ~block[:, None]) == 0
        out[at : at + _CHUNK] = inside.sum(axis=1)
    return out


def worst_retests_exhaustive(
    codes: np.ndarray, dmax: int, abort_above: int | None = None
) -> int | None:
    """Max validation-round size over all ambiguous patterns of <= dmax
    positives; None when it provably exceeds `abort_above`."""
    samples = codes.shape[0]
    pats = np.concatenate(
        [subset_patterns(codes, d) for d in range(1, min(dmax, samples) + 1)]
    )
    amb = ambiguous_values(pats)
    worst = 0
    for at in range(0, amb.shape[0], _CHUNK):
        block = amb[at : at + _CHUNK]
        inside = (codes[None, :] & ~block[:, None]) == 0
        worst = max(worst, int(inside.sum(axis=1).max()))
        if abort_above is not None and worst > abort_above:
            return None
    return worst


def containment_lower_bound(codes: np.ndarray) -> int:
    """Cheap retest lower bound from code containment (code_i inside code_j,
    i != j, makes pattern code_j ambiguous already at two positives)."""
    inside = (codes[None, :] & ~codes[:, None]) == 0
    counts = inside.sum(axis=1)
    counts = counts[counts >= 2]
    return int(counts.max()) if counts.size else 0


def _draw_subsets(rng: np.random.Generator, draws: int, samples: int, d: int) -> np.ndarray:
    """`draws` uniform size-d index sets (rows, unsorted order)."""
    keys = rng.random((draws, samples))
    return np.argpartition(keys, d - 1, axis=1)[:, :d] if d < samples else np.tile(
        np.arange(samples), (draws, 1)
    )


def worst_retests_mc(
    codes: np.ndarray,
    dmax: int,
    draws: int,
    rng: np.random.Generator,
    abort_above: int | None = None,
) -> int | None:
    """Monte Carlo analogue of `worst_retests_exhaustive` over size-dmax draws.

    A draw counts as ambiguous when the pattern admits more candidates than
    drawn positives, or some drawn positive is redundant (the others already
    cover the pattern).  The first condition can overcount ambiguity in rare
    corner cases, never undercount, so worst-case estimates stay safe.
    """
    samples = codes.shape[0]
    d = min(dmax, samples)
    worst = 0
    done = 0
    while done < draws:
        block = min(draws - done, 2048)
        idx = _draw_subsets(rng, block, samples, d)
        sub = codes[idx]
        pats = sub[:, 0].copy()
        for col in range(1, d):
            pats |= sub[:, col]
        inside = (codes[None, :] & ~pats[:, None]) == 0
        counts = inside.sum(axis=1)

        redundant = np.zeros(block, dtype=bool)
        if d > 1:
            prefix = np.zeros_like(sub)
            suffix = np.zeros_like(sub)
            for col in range(1, d):
                prefix[:, col] = prefix[:, col - 1] | sub[:, col - 1]
                suffix[:, d - 1 - col] = suffix[:, d - col] | sub[:, d - col]
            redundant = ((prefix | suffix) == pats[:, None]).any(axis=1)

        ambiguous = (counts > d) | redundant
        if ambiguous.any():
            worst = max(worst, int(counts[ambiguous].max()))
            if abort_above is not None and worst > abort_above:
                return None
        done += block
    return worst
