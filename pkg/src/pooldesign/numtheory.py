"""Small number-theory helpers used by the layered and residue constructions."""
from __future__ import annotations

import math
from functools import lru_cache


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@lru_cache(maxsize=None)
def primes_up_to(limit: int) -> tuple[int, ...]:
    """All primes <= limit, ascending (sieve of Eratosthenes)."""
    if limit < 2:
        return ()
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(math.isqrt(limit)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def first_primes(count: int) -> tuple[int, ...]:
    """The first `count` primes."""
    if count <= 0:
        return ()
    # upper bound on the count-th prime, loose but safe for small counts
    limit = 15 if count < 6 else int(count * (math.log(count) + math.log(math.log(count)))) + 10
    primes = primes_up_to(limit)
    while len(primes) < count:
        limit *= 2
        primes = primes_up_to(limit)
    return primes[:count]


def digit_span(base: int, total: int) -> int:
    """Smallest g with base**(g+1) > total.

    Equivalently the highest power of `base` needed so that every value in
    range(total) fits in g+1 base-`base` digits.
    """
    if base < 2:
        raise ValueError("base must be >= 2")
    if total < 1:
        raise ValueError("total must be >= 1")
    g = 0
    while base ** (g + 1) <= total:
        g += 1
    return g


def integer_root_ceil(value: int, degree: int) -> int:
    """Smallest L with L**degree >= value."""
    if value <= 1:
        return 1
    lo = int(round(value ** (1.0 / degree)))
    # float seed may be off by one either way
    while lo > 1 and (lo - 1) ** degree >= value:
        lo -= 1
    while lo ** degree < value:
        lo += 1
    return lo
