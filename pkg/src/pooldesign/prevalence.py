"""Probability that a sample batch holds more positives than a design resolves.

Positives are modeled as independent draws at a fixed prevalence, so the
positive count is binomial.  The failure probability of one experiment is
the upper tail beyond the design capacity; splitting the batch into separate
experiments trades test volume for a family-wise error correction.
"""
from __future__ import annotations

import math

from .errors import BadInputError

RECOMMEND_CAP = 4
ADVISABLE_PREVALENCE = 0.1
_MIN_WORTHWHILE = 2  # a part must hold at least 2*(capacity+1) samples


def _validate(samples: int, prevalence: float, differentiate: int, splits: int = 1) -> None:
    if samples < 1:
        raise BadInputError("samples must be >= 1")
    if not 0.0 <= prevalence <= 1.0:
        raise BadInputError("prevalence must lie in [0, 1]")
    if differentiate < 0:
        raise BadInputError("differentiate must be >= 0")
    if splits < 1:
        raise BadInputError("splits must be >= 1")


def _log_pmf(samples: int, hits: int, prevalence: float) -> float:
    term = (
        math.lgamma(samples + 1)
        - math.lgamma(hits + 1)
        - math.lgamma(samples - hits + 1)
    )
    if hits:
        term += hits * math.log(prevalence)
    if samples - hits:
        term += (samples - hits) * math.log1p(-prevalence)
    return term


def error_prob_exact(samples: int, prevalence: float, differentiate: int) -> float:
    """P(positive count > differentiate), summed in log space for stability."""
    _validate(samples, prevalence, differentiate)
    if differentiate >= samples:
        return 0.0
    if prevalence == 0.0:
        return 0.0
    if prevalence == 1.0:
        return 1.0
    tail = math.fsum(
        math.exp(_log_pmf(samples, d, prevalence))
        for d in range(differentiate + 1, samples + 1)
    )
    return min(max(tail, 0.0), 1.0)


def error_prob_normal(samples: int, prevalence: float, differentiate: int) -> float:
    """Gaussian tail approximation of `error_prob_exact`, same center and
    variance as the binomial count."""
    _validate(samples, prevalence, differentiate)
    variance = samples * prevalence * (1.0 - prevalence)
    if variance == 0.0:
        raise BadInputError(
            "normal approximation needs nonzero variance; use the exact form"
        )
    z = (differentiate - samples * prevalence) / math.sqrt(variance)
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def split_parts(samples: int, differentiate: int, splits: int) -> list[tuple[int, int]]:
    """Part sizes and capacity budgets for an even split, sums preserved.

    Larger parts take the larger budgets, so uneven remainders pair up.
    """
    s_hi, s_rem = divmod(samples, splits)
    d_hi, d_rem = divmod(differentiate, splits)
    sizes = [s_hi + 1] * s_rem + [s_hi] * (splits - s_rem)
    budgets = [d_hi + 1] * d_rem + [d_hi] * (splits - d_rem)
    return list(zip(sizes, budgets))


def error_prob_split(
    samples: int, prevalence: float, differentiate: int, splits: int
) -> dict:
    """Failure probability when the batch runs as `splits` separate experiments.

    Exact value is the complement of every part staying within budget; the
    first-order value (plain sum of part probabilities) is reported for
    display alongside.
    """
    _validate(samples, prevalence, differentiate, splits)
    if splits > samples:
        raise BadInputError("more splits than samples")
    parts = []
    for size, budget in split_parts(samples, differentiate, splits):
        parts.append(
            {
                "samples": size,
                "differentiate": budget,
                "error_prob": error_prob_exact(size, prevalence, budget),
            }
        )
    ok = 1.0
    for part in parts:
        ok *= 1.0 - part["error_prob"]
    return {
        "exact": min(max(1.0 - ok, 0.0), 1.0),
        "first_order": math.fsum(part["error_prob"] for part in parts),
        "parts": parts,
    }


def error_rate_report(
    samples: int, prevalence: float, differentiate: int, splits: int = 1
) -> dict:
    """Bundle of exact, approximate, and split views for one query."""
    split = error_prob_split(samples, prevalence, differentiate, splits)
    try:
        normal = error_prob_normal(samples, prevalence, differentiate)
        approximation = True
    except BadInputError:
        normal = None
        approximation = False
    return {
        "samples": samples,
        "prevalence": prevalence,
        "differentiate": differentiate,
        "splits": splits,
        "exact": split["exact"],
        "normal": normal,
        "approximation": approximation,
        "first_order": split["first_order"],
        "parts": split["parts"],
    }


NOT_ADVISABLE = "group testing not advisable"


def recommend(
    samples: int,
    prevalence: float,
    tolerance: float,
    differentiate_cap: int = RECOMMEND_CAP,
    with_comparison: bool = True,
) -> dict:
    """Smallest capacity, then smallest split count, that keeps the failure
    probability within tolerance.

    Splits get equal per-part capacity; a candidate only counts when each
    part is still large enough to be worth pooling (at least twice capacity
    plus one).  High prevalence or no workable split gives an explicit
    not-advisable result instead of a plan.
    """
    _validate(samples, prevalence, 0)
    if not 0.0 < tolerance < 1.0:
        raise BadInputError("tolerance must lie strictly between 0 and 1")

    def _plan(differentiate: int, splits: int, error: float) -> dict:
        part = -(-samples // splits)
        plan = {
            "samples": samples,
            "prevalence": prevalence,
            "tolerance": tolerance,
            "advisable": True,
            "differentiate": differentiate,
            "splits": splits,
            "part_samples": part,
            "error_prob": error,
            "note": None,
        }
        if with_comparison:
            from .evaluate import compare_methods

            plan["comparison"] = compare_methods(part, differentiate)
        return plan

    def _refuse(note: str) -> dict:
        return {
            "samples": samples,
            "prevalence": prevalence,
            "tolerance": tolerance,
            "advisable": False,
            "differentiate": None,
            "splits": None,
            "part_samples": None,
            "error_prob": None,
            "note": f"{NOT_ADVISABLE}: {note}",
        }

    if prevalence == 0.0:
        return _plan(1, 1, 0.0)
    if prevalence > ADVISABLE_PREVALENCE:
        return _refuse(
            f"prevalence {prevalence:g} is above {ADVISABLE_PREVALENCE:g}, "
            "pools would read positive too often to save tests"
        )

    for differentiate in range(1, differentiate_cap + 1):
        if samples < _MIN_WORTHWHILE * (differentiate + 1):
            break
        error = error_prob_exact(samples, prevalence, differentiate)
        if error <= tolerance:
            return _plan(differentiate, 1, error)

    splits = 2
    while -(-samples // splits) >= _MIN_WORTHWHILE * 2:
        part = -(-samples // splits)
        sizes = [size for size, _ in split_parts(samples, 0, splits)]
        for differentiate in range(1, differentiate_cap + 1):
            if part < _MIN_WORTHWHILE * (differentiate + 1):
                break
            ok = 1.0
            for size in sizes:
                ok *= 1.0 - error_prob_exact(size, prevalence, differentiate)
            error = 1.0 - ok
            if error <= tolerance:
                return _plan(differentiate, splits, error)
        splits += 1

    return _refuse(
        f"no split of {samples} samples meets tolerance {tolerance:g} "
        f"with capacity {differentiate_cap} or less per experiment"
    )
