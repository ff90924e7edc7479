"""Closed-form one-round constructions: grid, mixed-radix, and binary-code.

These three are 1-differentiate constructions by nature; they stay usable at
higher differentiate targets because ambiguous readouts fall through to a
round of individual retests.  The requested target is recorded on the design
so decoding and evaluation know what to guarantee.
"""
from __future__ import annotations

import math

from ..core import Design, make_design
from ..errors import BadInputError
from ..numtheory import integer_root_ceil


def build_matrix(samples: int, differentiate: int = 1) -> Design:
    """Arrange samples in a grid; one pool per row and per column.

    With A = ceil(sqrt(S)) rows and B = ceil(S/A) columns, sample s sits in
    row s // B and column s % B.  Row pools come first, then column pools.
    """
    if samples < 2:
        raise BadInputError("matrix design needs at least 2 samples")
    a = math.isqrt(samples)
    if a * a < samples:
        a += 1
    b = -(-samples // a)
    rows = [[s for s in range(samples) if s // b == r] for r in range(a)]
    cols = [[s for s in range(samples) if s % b == c] for c in range(b)]
    return make_design(
        "matrix",
        samples,
        differentiate,
        {"grid_rows": a, "grid_cols": b},
        rows + cols,
    )


def build_multidim(samples: int, dims: int, differentiate: int = 1) -> Design:
    """Place samples in an N-dimensional box; one pool per grid hyperplane.

    The box has side L = ceil(S^(1/N)) along the first eta+1 axes and L-1
    along the rest, with eta the smallest value whose box still holds all
    samples.  Sample s maps to mixed-radix digits (least significant axis
    first); pool (n, v) collects the samples whose digit n equals v.
    """
    if dims < 2:
        raise BadInputError("multidim design needs at least 2 dimensions")
    if samples < 2 ** dims:
        raise BadInputError(f"multidim with {dims} dimensions needs at least {2 ** dims} samples")
    side = integer_root_ceil(samples, dims)
    eta = 0
    while side ** (eta + 1) * (side - 1) ** (dims - 1 - eta) < samples:
        eta += 1
    sides = [side if n <= eta else side - 1 for n in range(dims)]

    weights = [1] * dims
    for n in range(1, dims):
        weights[n] = weights[n - 1] * sides[n - 1]

    pools = []
    for n in range(dims):
        for v in range(sides[n]):
            pools.append([s for s in range(samples) if (s // weights[n]) % sides[n] == v])
    return make_design(
        "multidim",
        samples,
        differentiate,
        {"dims": dims, "sides": sides, "eta": eta},
        pools,
    )


def build_binary(samples: int, differentiate: int = 1) -> Design:
    """Give each sample a nonzero binary code; pool w reads bit w.

    Codes are 1..S with code 0 left unused, so an all-negative readout means
    no positives rather than "sample with code 0".  Sample s >= 1 takes code
    s and sample 0 takes code S.
    """
    if samples < 2:
        raise BadInputError("binary design needs at least 2 samples")
    width = samples.bit_length()

    def code(s: int) -> int:
        return s if s else samples

    pools = [[s for s in range(samples) if code(s) >> w & 1] for w in range(width)]
    return make_design("binary", samples, differentiate, {"code_bits": width}, pools)
