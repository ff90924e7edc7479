"""Randomized pooling search over a (pool count, pool size) grid.

Every grid point gets a few seeded trials; each trial draws every pool as a
uniform random subset of fixed size.  Candidates that leave some sample
unpooled are discarded.  The winner minimizes estimated worst-case total
tests (round 0 plus individual retests after an ambiguous readout), with
ties broken by smaller pool size, then fewer pools, then trial order.
"""
from __future__ import annotations

import math

import numpy as np

from .. import patterns
from ..core import Design, make_design
from ..errors import BadInputError

TRIALS = 5
FITNESS_BUDGET = 2_000_000
FITNESS_DRAWS = 10_000
_ORDER_TAG = 0x52414E44
_DRAW_TAG = 0x4D435357


def search_ranges(samples: int) -> tuple[range, range]:
    """(pool-count range, pool-size range) for the grid."""
    w_lo = max(1, (samples - 1).bit_length())
    w_hi = math.isqrt(4 * samples)
    if w_hi * w_hi < 4 * samples:
        w_hi += 1
    sw_lo = max(1, math.isqrt(samples))
    sw_hi = samples // 2
    return range(w_lo, w_hi + 1), range(sw_lo, sw_hi + 1)


def _pool_order(seed: int, samples: int, differentiate: int, w: int, trial: int) -> np.ndarray:
    """Per-pool sample priority: pool r of size S_W takes order[r, :S_W]."""
    ss = np.random.SeedSequence([_ORDER_TAG, seed, samples, differentiate, w, trial])
    rng = np.random.default_rng(ss)
    return np.argsort(rng.random((w, samples)), axis=1)


def _estimate(codes, w, differentiate, exhaustive, draws, draw_seed_entropy, abort_above):
    if exhaustive:
        return patterns.worst_retests_exhaustive(codes, differentiate, abort_above)
    rng = np.random.default_rng(np.random.SeedSequence(draw_seed_entropy))
    return patterns.worst_retests_mc(codes, differentiate, draws, rng, abort_above)


def build_random(
    samples: int,
    differentiate: int,
    seed: int = 0,
    trials: int = TRIALS,
    fitness_budget: int | None = None,
    fitness_draws: int | None = None,
) -> Design:
    if samples < 4:
        raise BadInputError("random design needs at least 4 samples")
    if differentiate < 1:
        raise BadInputError("differentiate must be >= 1")
    if seed < 0:
        raise BadInputError("seed must be non-negative")
    budget = FITNESS_BUDGET if fitness_budget is None else fitness_budget
    draws = FITNESS_DRAWS if fitness_draws is None else fitness_draws
    exhaustive = patterns.total_subsets(samples, differentiate) <= budget

    w_range, sw_range = search_ranges(samples)
    bits_template = (np.uint64(1) << np.arange(64, dtype=np.uint64))

    best: tuple[int, int, int, int] | None = None  # (tests, S_W, W, trial)
    best_exact = exhaustive
    for w in w_range:
        if best is not None and w > best[0]:
            break
        bits = bits_template[:w]
        for trial in range(trials):
            order = _pool_order(seed, samples, differentiate, w, trial)
            codes = np.zeros(samples, dtype=np.uint64)
            for r in range(w):
                codes[order[r, : sw_range.start]] |= bits[r]
            for s_w in sw_range:
                if s_w != sw_range.start:
                    np.bitwise_or.at(codes, order[:, s_w - 1], bits)
                if not codes.all():
                    continue
                abort_above = None if best is None else best[0] - w
                if abort_above is not None and abort_above < 0:
                    break
                retests = _estimate(
                    codes,
                    w,
                    differentiate,
                    exhaustive,
                    draws,
                    [_DRAW_TAG, seed, samples, differentiate, w, trial, s_w],
                    abort_above,
                )
                if retests is None:
                    continue
                key = (w + retests, s_w, w, trial)
                if best is None or key < best:
                    best = key

    if best is None:
        return _partition_fallback(samples, differentiate, seed)

    tests, s_w, w, trial = best
    order = _pool_order(seed, samples, differentiate, w, trial)
    pools = [sorted(int(x) for x in order[r, :s_w]) for r in range(w)]
    return make_design(
        "random",
        samples,
        differentiate,
        {
            "pools": w,
            "pool_size": s_w,
            "seed": seed,
            "trial": trial,
            "estimated_tests": tests,
            "estimate_exact": best_exact,
        },
        pools,
    )


def _partition_fallback(samples: int, differentiate: int, seed: int) -> Design:
    """Deterministic stand-in when every sampled candidate failed coverage:
    disjoint residue-class pools (always valid, decodes like any design)."""
    k = max(2, math.isqrt(samples))
    pools = [[s for s in range(samples) if s % k == v] for v in range(k)]
    biggest = max(len(p) for p in pools)
    return make_design(
        "random",
        samples,
        differentiate,
        {
            "pools": k,
            "pool_size": biggest,
            "seed": seed,
            "trial": -1,
            "estimated_tests": k + biggest,
            "estimate_exact": True,
        },
        pools,
    )
