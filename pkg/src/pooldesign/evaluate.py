"""Worst-case metrics, separability verification, and method comparison.

Two independent routes exist on purpose.  `metrics` reasons about readout
patterns in bulk (fast, vectorized); `verify_separable` and
`run_ideal_session` replay full sessions one positive set at a time (slow,
obviously correct).  Tests pit them against each other.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import patterns
from .constructors import build, method_specs
from .constructors.hierarchy import costs_from_policy
from .core import Adaptivity, Design
from .decode import simulate
from .errors import BadInputError, PoolDesignError
from .session import FINISHED, AWAITING, SessionState, session_start, session_submit

ENUMERATION_BUDGET = 2_000_000
MC_DRAWS = 10_000
METRIC_NAMES = ("tests", "group_size", "steps", "high_prevalence_scaling")
QUINTILE_LABELS = ("very good", "good", "average", "poor", "very poor")


@dataclass(frozen=True)
class DesignMetrics:
    tests_worst: int
    tests_per_sample: float
    steps_worst: int
    max_group_size: int
    exact: bool

    def to_dict(self) -> dict:
        return {
            "tests_worst": self.tests_worst,
            "tests_per_sample": self.tests_per_sample,
            "steps_worst": self.steps_worst,
            "max_group_size": self.max_group_size,
            "exact": self.exact,
        }


def _finish(design: Design, retests: int, exact: bool) -> DesignMetrics:
    width = design.width
    tests = width + retests
    return DesignMetrics(
        tests_worst=tests,
        tests_per_sample=tests / design.samples,
        steps_worst=1 if retests == 0 else 2,
        max_group_size=max(len(p) for p in design.rounds[0].pools),
        exact=exact,
    )


def _bigint_codes(design: Design) -> list[int]:
    codes = [0] * design.samples
    for w, pool in enumerate(design.rounds[0].pools):
        for s in pool:
            codes[s] |= 1 << w
    return codes


def _bigint_retests_exhaustive(codes: list[int], dmax: int) -> int:
    seen: dict[int, int] = {}
    samples = len(codes)
    for d in range(1, min(dmax, samples) + 1):
        for sub in itertools.combinations(codes, d):
            pat = 0
            for c in sub:
                pat |= c
            seen[pat] = seen.get(pat, 0) + 1
    worst = 0
    for pat, mult in seen.items():
        if mult >= 2:
            worst = max(worst, sum(1 for c in codes if c & ~pat == 0))
    return worst


def _bigint_retests_mc(codes: list[int], dmax: int, draws: int, seed: int) -> int:
    rng = random.Random(seed)
    samples = len(codes)
    d = min(dmax, samples)
    worst = 0
    for _ in range(draws):
        sub = rng.sample(codes, d)
        pat = 0
        for c in sub:
            pat |= c
        count = sum(1 for c in codes if c & ~pat == 0)
        redundant = any(_union_without(sub, i) == pat for i in range(d)) if d > 1 else False
        if count > d or redundant:
            worst = max(worst, count)
    return worst


def _union_without(sub: Sequence[int], skip: int) -> int:
    pat = 0
    for i, c in enumerate(sub):
        if i != skip:
            pat |= c
    return pat


def metrics(
    design: Design,
    enumeration_budget: int = ENUMERATION_BUDGET,
    mc_draws: int = MC_DRAWS,
    seed: int = 0,
) -> DesignMetrics:
    """Worst-case session cost over every positive set within capacity.

    Non-adaptive designs finish in their single round by construction, and
    the split policy of strictly adaptive designs carries its own worst-case
    model, so only the one-round-plus-validation designs need readout
    enumeration (exhaustive within budget, else seeded Monte Carlo).
    """
    if design.adaptivity is Adaptivity.NON_ADAPTIVE:
        return _finish(design, 0, True)
    if design.adaptivity is Adaptivity.STRICTLY_ADAPTIVE:
        policy = {(int(n), int(b)): int(k) for n, b, k in design.params["policy"]}
        tests, steps = costs_from_policy(policy, design.samples, design.differentiate)
        return DesignMetrics(
            tests_worst=tests,
            tests_per_sample=tests / design.samples,
            steps_worst=steps,
            max_group_size=max(len(p) for p in design.rounds[0].pools),
            exact=True,
        )

    dmax = design.differentiate
    exhaustive = patterns.total_subsets(design.samples, dmax) <= enumeration_budget
    if design.width <= 64:
        codes = patterns.pack_codes(list(design.rounds[0].pools), design.samples)
        if exhaustive:
            retests = patterns.worst_retests_exhaustive(codes, dmax)
        else:
            rng = np.random.default_rng([seed, design.samples, dmax, design.width])
            retests = patterns.worst_retests_mc(codes, dmax, mc_draws, rng)
        assert retests is not None
        return _finish(design, retests, exhaustive)

    wide = _bigint_codes(design)
    if exhaustive:
        return _finish(design, _bigint_retests_exhaustive(wide, dmax), True)
    return _finish(design, _bigint_retests_mc(wide, dmax, mc_draws, seed), False)


# -- session replay oracle ---------------------------------------------------


def run_ideal_session(design: Design, positives: Iterable[int]) -> SessionState:
    """Run a full session feeding in the ideal readout of a known positive set."""
    positives = frozenset(positives)
    state = session_start(design)
    while state.status == AWAITING:
        assert state.pending_round is not None
        state = session_submit(state, simulate(state.pending_round, positives))
    return state


def _declared_steps(design: Design) -> int:
    if design.adaptivity is Adaptivity.STRICTLY_ADAPTIVE:
        policy = {(int(n), int(b)): int(k) for n, b, k in design.params["policy"]}
        return costs_from_policy(policy, design.samples, design.differentiate)[1]
    return len(design.rounds)


def _verify_subjects(
    design: Design, enumeration_budget: int, mc_draws: int, seed: int
) -> tuple[bool, Iterable[tuple[int, ...]]]:
    samples, dmax = design.samples, design.differentiate
    if patterns.total_subsets(samples, dmax) <= enumeration_budget:
        subjects = itertools.chain.from_iterable(
            itertools.combinations(range(samples), d) for d in range(0, dmax + 1)
        )
        return True, subjects
    rng = random.Random(seed)

    def sampled() -> Iterable[tuple[int, ...]]:
        yield ()
        for i in range(mc_draws):
            d = (i % dmax) + 1
            yield tuple(rng.sample(range(samples), d))

    return False, sampled()


def verify_separable(
    design: Design,
    enumeration_budget: int = ENUMERATION_BUDGET,
    mc_draws: int = MC_DRAWS,
    seed: int = 0,
) -> dict:
    """Check that every tested positive set is recovered exactly within the
    rounds the design itself declares (its prescribed round list, or the
    split policy's worst case for adaptive designs).

    Exhaustive over all sets within capacity when affordable, else seeded
    sampling.  Reports the first counterexample found.
    """
    declared = _declared_steps(design)
    exact, subjects = _verify_subjects(design, enumeration_budget, mc_draws, seed)
    checked = 0
    for subset in subjects:
        state = run_ideal_session(design, subset)
        checked += 1
        ok = (
            state.status == FINISHED
            and state.resolved_positives == tuple(sorted(subset))
            and state.rounds_used <= declared
        )
        if not ok:
            return {
                "ok": False,
                "exact": exact,
                "checked": checked,
                "declared_steps": declared,
                "counterexample": {
                    "positives": sorted(subset),
                    "status": state.status,
                    "resolved": list(state.resolved_positives or ()),
                    "rounds_used": state.rounds_used,
                    "failure_reason": state.failure_reason,
                },
            }
    return {
        "ok": True,
        "exact": exact,
        "checked": checked,
        "declared_steps": declared,
        "counterexample": None,
    }


# -- cross-method tables ------------------------------------------------------


def compare_methods(
    samples: int,
    differentiate: int,
    max_group_size: int | None = None,
    max_steps: int | None = None,
    enumeration_budget: int = ENUMERATION_BUDGET,
    mc_draws: int = MC_DRAWS,
    seed: int = 0,
) -> dict:
    """Metrics for every method at one (samples, differentiate) cell.

    Constraint limits do not drop rows; they fill each row's `violations`
    list so callers can grey or filter while still showing the numbers.
    Methods that cannot produce a design land in `infeasible`.
    """
    rows = []
    infeasible = []
    for spec in method_specs(differentiate):
        try:
            design = build(spec, samples, differentiate, seed=seed)
            m = metrics(design, enumeration_budget, mc_draws, seed)
        except PoolDesignError as exc:
            infeasible.append({"method": spec, "reason": str(exc)})
            continue
        violations = []
        if max_group_size is not None and m.max_group_size > max_group_size:
            violations.append(f"max group size {m.max_group_size} exceeds limit {max_group_size}")
        if max_steps is not None and m.steps_worst > max_steps:
            violations.append(f"steps {m.steps_worst} exceeds limit {max_steps}")
        rows.append({"method": spec, **m.to_dict(), "violations": violations})
    return {
        "samples": samples,
        "differentiate": differentiate,
        "rows": rows,
        "infeasible": infeasible,
    }


def _metric_value(m: DesignMetrics, metric: str) -> float:
    if metric == "tests":
        return float(m.tests_worst)
    if metric == "group_size":
        return float(m.max_group_size)
    if metric == "steps":
        return float(m.steps_worst)
    raise ValueError(metric)


def rank_methods(
    s_range: Sequence[int] | None,
    differentiate: int,
    metric: str,
    enumeration_budget: int = ENUMERATION_BUDGET,
    mc_draws: int = MC_DRAWS,
    seed: int = 0,
) -> dict:
    """Average a metric per method over a sample-count range, sort ascending
    (smaller is better for every supported metric), and attach quintile
    labels.  `high_prevalence_scaling` averages tests per sample over
    capacities 1..4 instead of using `differentiate`.

    Methods that fail to build anywhere in the range are excluded, with the
    first failure quoted.
    """
    if metric not in METRIC_NAMES:
        raise BadInputError(f"metric must be one of {', '.join(METRIC_NAMES)}")
    s_values = list(s_range) if s_range is not None else list(range(20, 101))
    if metric == "high_prevalence_scaling":
        cells = [(s, d) for s in s_values for d in (1, 2, 3, 4)]
        specs = sorted(set(method_specs(1) + ["cr_special2", "cr_special3"]))
    else:
        cells = [(s, differentiate) for s in s_values]
        specs = method_specs(differentiate)

    averages: list[tuple[str, float]] = []
    excluded = []
    for spec in specs:
        values = []
        note = None
        for s, d in cells:
            if (spec == "cr_special2" and d != 2) or (spec == "cr_special3" and d != 3):
                note = f"{spec} is fixed to one capacity; cannot cover d={d}"
                break
            try:
                design = build(spec, s, d, seed=seed)
                m = metrics(design, enumeration_budget, mc_draws, seed)
            except PoolDesignError as exc:
                note = f"infeasible at samples={s}, differentiate={d}: {exc}"
                break
            values.append(
                m.tests_worst / s if metric == "high_prevalence_scaling" else _metric_value(m, metric)
            )
        if note is not None:
            excluded.append({"method": spec, "note": note})
        else:
            averages.append((spec, sum(values) / len(values)))

    averages.sort(key=lambda pair: (pair[1], pair[0]))
    n = len(averages)
    rows = [
        {"method": spec, "average": value, "quintile": QUINTILE_LABELS[idx * 5 // n]}
        for idx, (spec, value) in enumerate(averages)
    ]
    return {"metric": metric, "differentiate": differentiate, "rows": rows, "excluded": excluded}
