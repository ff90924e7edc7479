"""Adaptive splitting design: test pools in waves, re-split the positives.

A group of n samples under a bound of b possible positives is split into k
balanced pools and all k are tested.  Positive singletons are resolved
positives, larger positive pools recurse.  The split arity per observable
state (n, b) is the policy; sessions replay it from the design params.

For a 1-positive target the arity rule is fixed: split in three, except
groups of 2 or 4 split in two.  For larger targets the arity is chosen per
state to minimize worst-case total tests against an adversary that places
the positives as expensively as possible.
"""
from __future__ import annotations

from ..core import Design, make_design
from ..errors import BadInputError

MAX_ARITY = 6


def part_sizes(n: int, k: int) -> list[int]:
    """Balanced split of n into k parts, larger parts first, difference <= 1."""
    small, extra = divmod(n, k)
    return [small + 1] * extra + [small] * (k - extra)


def split_slices(members: tuple[int, ...], k: int) -> list[tuple[int, ...]]:
    """Cut an ordered sample tuple into the balanced contiguous parts."""
    out = []
    at = 0
    for size in part_sizes(len(members), k):
        out.append(members[at : at + size])
        at += size
    return out


class Planner:
    """Split-policy search and worst-case cost model for one (S, D)."""

    def __init__(self, samples: int, differentiate: int, max_arity: int = MAX_ARITY):
        self.samples = samples
        self.differentiate = differentiate
        self.fixed_ternary = differentiate == 1
        self.max_arity = max_arity
        self._policy: dict[tuple[int, int], int] = {}
        self._tests: dict[tuple[int, int, int], int] = {}
        self._steps: dict[tuple[int, int, int], int] = {}

    # -- policy ----------------------------------------------------------

    def arity(self, n: int, b: int) -> int:
        b = min(b, n)
        key = (n, b)
        got = self._policy.get(key)
        if got is not None:
            return got
        if self.fixed_ternary:
            k = 2 if n in (2, 4) else min(3, n)
        else:
            best: tuple[int, int] | None = None
            for cand in range(2, min(n, self.max_arity) + 1):
                worst = max(self._tests_for(n, d, b, cand) for d in range(1, b + 1))
                if best is None or (worst, cand) < best:
                    best = (worst, cand)
            assert best is not None
            k = best[1]
        self._policy[key] = k
        return k

    # -- worst-case costs --------------------------------------------------

    def tests(self, n: int, d: int, b: int) -> int:
        """Worst-case further tests for a positive group of n holding exactly
        d positives, under an observable bound of b."""
        b = min(b, n)
        if n == 1:
            return 0
        key = (n, d, b)
        got = self._tests.get(key)
        if got is None:
            got = self._tests_for(n, d, b, self.arity(n, b))
            self._tests[key] = got
        return got

    def steps(self, n: int, d: int, b: int) -> int:
        """Worst-case further rounds for the same state."""
        b = min(b, n)
        if n == 1:
            return 0
        key = (n, d, b)
        got = self._steps.get(key)
        if got is None:
            got = self._adversary(n, d, b, self.arity(n, b), self.steps, parallel=True) + 1
            self._steps[key] = got
        return got

    def _tests_for(self, n: int, d: int, b: int, k: int) -> int:
        return k + self._adversary(n, d, b, k, self.tests, parallel=False)

    def _adversary(self, n, d, b, k, child_cost, parallel: bool) -> int:
        """Max over positive-pool count, big/small assignment, and positive
        placement of the combined child cost (sum of tests, max of rounds)."""
        sizes = part_sizes(n, k)
        n_big = sizes.count(sizes[0])
        big, small = sizes[0], sizes[-1]
        worst = 0
        for m in range(1, min(k, d) + 1):
            budget = b - m + 1
            for j in range(max(0, m - (k - n_big)), min(n_big, m) + 1):
                picked = [big] * j + [small] * (m - j)
                if sum(picked) < d:
                    continue
                got = self._place(tuple(picked), d, budget, child_cost, parallel)
                if got is not None and got > worst:
                    worst = got
        return worst

    def _place(self, sizes, d, budget, child_cost, parallel) -> int | None:
        """Best adversary distribution of exactly d positives over the given
        positive parts (each gets at least one)."""
        if not sizes:
            return 0 if d == 0 else None
        head, rest = sizes[0], sizes[1:]
        need_rest = len(rest)
        best = None
        for x in range(1, min(head, d - need_rest) + 1):
            tail = self._place(rest, d - x, budget, child_cost, parallel)
            if tail is None:
                continue
            here = child_cost(head, x, min(head, budget))
            got = max(here, tail) if parallel else here + tail
            if best is None or got > best:
                best = got
        return best

    # -- design-level summaries ---------------------------------------------

    def worst_tests(self) -> int:
        b = min(self.differentiate, self.samples)
        root = self.arity(self.samples, b)
        return max(
            [root] + [root + self._adversary(self.samples, d, b, root, self.tests, False)
                      for d in range(1, b + 1)]
        )

    def worst_steps(self) -> int:
        b = min(self.differentiate, self.samples)
        root = self.arity(self.samples, b)
        return max(
            [1] + [1 + self._adversary(self.samples, d, b, root, self.steps, True)
                   for d in range(1, b + 1)]
        )

    def policy_table(self) -> list[list[int]]:
        return [[n, b, k] for (n, b), k in sorted(self._policy.items())]


def plan_hierarchical(samples: int, differentiate: int) -> Planner:
    if samples < 2:
        raise BadInputError("hierarchical design needs at least 2 samples")
    if differentiate < 1:
        raise BadInputError("differentiate must be >= 1")
    planner = Planner(samples, differentiate)
    # touch every state reachable from the root so the policy table is total
    planner.worst_tests()
    planner.worst_steps()
    return planner


def build_hierarchical(samples: int, differentiate: int) -> Design:
    planner = plan_hierarchical(samples, differentiate)
    b = min(differentiate, samples)
    k0 = planner.arity(samples, b)
    round0 = split_slices(tuple(range(samples)), k0)
    return make_design(
        "hierarchical",
        samples,
        differentiate,
        {"root_arity": k0, "policy": planner.policy_table()},
        round0,
    )


def costs_from_policy(
    policy: dict[tuple[int, int], int], samples: int, differentiate: int
) -> tuple[int, int]:
    """Worst-case (tests, rounds) replayed from a stored policy table."""
    planner = Planner(samples, differentiate)
    planner._policy.update(policy)
    return planner.worst_tests(), planner.worst_steps()
