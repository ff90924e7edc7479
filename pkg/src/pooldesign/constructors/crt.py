"""Residue-based constructions built on the Chinese remainder theorem.

A block for modulus t holds one pool per residue class; two samples share a
pool in that block iff they are congruent mod t.  With pairwise coprime
block moduli whose product reaches S^D, a set of up to D positives is
recovered exactly from the positive residues.
"""
from __future__ import annotations

import itertools

from ..core import Design, make_design
from ..errors import BadInputError
from ..numtheory import first_primes


def _residue_pools(samples: int, moduli: list[int]) -> list[list[int]]:
    pools = []
    for t in moduli:
        for v in range(t):
            pools.append([s for s in range(samples) if s % t == v])
    return pools


def _prime_prefix(samples: int, differentiate: int) -> list[int]:
    """Smallest prefix of the primes whose product reaches S^D."""
    target = samples ** differentiate
    primes: list[int] = []
    count = 0
    product = 1
    while product < target:
        count += 1
        primes = list(first_primes(count))
        product = 1
        for p in primes:
            product *= p
    return primes


def build_cr(samples: int, differentiate: int) -> Design:
    """One block per prime in the minimal prefix, all exponents 1."""
    if samples < 2:
        raise BadInputError("cr design needs at least 2 samples")
    if differentiate < 1:
        raise BadInputError("differentiate must be >= 1")
    primes = _prime_prefix(samples, differentiate)
    return make_design(
        "cr",
        samples,
        differentiate,
        {"primes": primes, "exponents": [1] * len(primes)},
        _residue_pools(samples, primes),
    )


def build_cr_backtrack(samples: int, differentiate: int) -> Design:
    """Re-optimize the block sizes of the plain prime-prefix construction.

    The prime set is fixed to the same minimal prefix (largest prime p_J);
    exponents e_j >= 0 are then chosen to minimize total pools
    T = sum of p_j^e_j over kept blocks, subject to the product still
    reaching S^D and no block exceeding p_J.  Ties prefer fewer blocks,
    then the lexicographically smallest exponent vector.
    """
    if samples < 2:
        raise BadInputError("cr_backtrack design needs at least 2 samples")
    if differentiate < 1:
        raise BadInputError("differentiate must be >= 1")
    primes = _prime_prefix(samples, differentiate)
    target = samples ** differentiate
    cap = primes[-1]

    max_exp = []
    for p in primes:
        e = 0
        while p ** (e + 1) <= cap:
            e += 1
        max_exp.append(e)

    best_key: tuple[int, int, tuple[int, ...]] | None = None
    for exps in itertools.product(*(range(e + 1) for e in max_exp)):
        product = 1
        total = 0
        blocks = 0
        for p, e in zip(primes, exps):
            if e:
                t = p ** e
                product *= t
                total += t
                blocks += 1
        if product < target:
            continue
        key = (total, blocks, exps)
        if best_key is None or key < best_key:
            best_key = key
    assert best_key is not None  # exps = all ones is always feasible
    exps = best_key[2]

    kept_primes = [p for p, e in zip(primes, exps) if e]
    kept_exps = [e for e in exps if e]
    moduli = [p ** e for p, e in zip(kept_primes, kept_exps)]
    return make_design(
        "cr_backtrack",
        samples,
        differentiate,
        {"primes": kept_primes, "exponents": kept_exps},
        _residue_pools(samples, moduli),
    )


def _base_digits(value: int, base: int, count: int) -> list[int]:
    digits = []
    for _ in range(count):
        digits.append(value % base)
        value //= base
    return digits


def build_cr_special2(samples: int) -> Design:
    """Two-positive design over base-3 codes.

    With q = ceil(log3 S) digits there are 3q digit pools (digit d equals
    value v) plus one equality pool per digit pair (digit d' equals digit
    d''), totalling (q^2 + 5q)/2 pools.
    """
    if samples < 3:
        raise BadInputError("cr_special2 design needs at least 3 samples")
    q = 1
    while 3 ** q < samples:
        q += 1
    codes = [_base_digits(s, 3, q) for s in range(samples)]

    pools = []
    for d in range(q):
        for v in range(3):
            pools.append([s for s in range(samples) if codes[s][d] == v])
    for d1, d2 in itertools.combinations(range(q), 2):
        pools.append([s for s in range(samples) if codes[s][d1] == codes[s][d2]])
    return make_design("cr_special2", samples, 2, {"digits": q}, pools)


def build_cr_special3(samples: int) -> Design:
    """Three-positive design over base-2 codes.

    With q = ceil(log2 S) bits there is one pool per (bit pair, bit-value
    pair): samples whose bit d' equals v' and bit d'' equals v''.  That is
    4 * C(q,2) = 2q(q-1) pools.
    """
    if samples < 4:
        raise BadInputError("cr_special3 design needs at least 4 samples")
    q = 1
    while 2 ** q < samples:
        q += 1
    pools = []
    for d1, d2 in itertools.combinations(range(q), 2):
        for v1, v2 in itertools.product((0, 1), repeat=2):
            pools.append(
                [s for s in range(samples) if (s >> d1 & 1) == v1 and (s >> d2 & 1) == v2]
            )
    return make_design("cr_special3", samples, 3, {"bits": q}, pools)
