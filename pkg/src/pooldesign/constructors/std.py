"""Shifted-transversal construction: k layers of q pools driven by a prime q.

Each layer partitions all samples into q pools, and any two samples share a
pool in at most gamma(q, S) of the first q layers, so k = D*gamma + 1 layers
guarantee D-positive resolution in one round.
"""
from __future__ import annotations

from ..core import Design, make_design
from ..errors import BadInputError, InfeasibleError
from ..numtheory import digit_span, primes_up_to


def gamma(q: int, samples: int) -> int:
    """Compressing power: smallest g with q**(g+1) > samples."""
    if q < 2 or samples < 2:
        raise BadInputError("gamma needs q >= 2 and samples >= 2")
    return digit_span(q, samples)


def _shift_total(s: int, j: int, q: int, g: int) -> int:
    # sum over base-q digit positions c of j^c * (s // q^c)
    total = 0
    power = 1
    for c in range(g + 1):
        total += (j ** c) * (s // power)
        power *= q
    return total


def build_std(samples: int, differentiate: int) -> Design:
    """Pick the feasible prime minimizing pool count, then emit the layers.

    Feasibility: D * gamma(q, S) <= q.  W = q * k with k = D*gamma + 1
    layers.  Ties on W go to the larger prime, which shrinks the pools.
    Layer j < q assigns sample s by the shift total mod q; the extra layer
    j = q (only when k = q + 1) uses the degenerate shift s // q^gamma.
    """
    if samples < 2:
        raise BadInputError("std design needs at least 2 samples")
    if differentiate < 1:
        raise BadInputError("differentiate must be >= 1")
    best: tuple[int, int] | None = None  # (W, -q) for min-compare
    chosen: tuple[int, int, int] | None = None
    for q in primes_up_to(samples):
        g = gamma(q, samples)
        if differentiate * g > q:
            continue
        k = differentiate * g + 1
        w = q * k
        key = (w, -q)
        if best is None or key < best:
            best = key
            chosen = (q, g, k)
    if chosen is None:
        raise InfeasibleError(
            f"no prime q <= {samples} satisfies D*gamma(q,S) <= q for D={differentiate}"
        )
    q, g, k = chosen

    pools: list[list[int]] = [[] for _ in range(q * k)]
    for j in range(k):
        for s in range(samples):
            if j == q:
                t = s // q ** g
            else:
                t = _shift_total(s, j, q, g)
            pools[q * j + t % q].append(s)
    return make_design(
        "std",
        samples,
        differentiate,
        {"q": q, "gamma": g, "layers": k},
        pools,
    )
