"""Design constructors: one entry point per pooling method.

`build` dispatches on a method spec string.  `multidim` takes a dimension
count, written as "multidim:3"; the bare name defaults to 3 dimensions.
"""
from __future__ import annotations

from ..core import Design
from ..errors import BadInputError
from .simple import build_binary, build_matrix, build_multidim
from .std import build_std, gamma
from .crt import build_cr, build_cr_backtrack, build_cr_special2, build_cr_special3
from .hierarchy import build_hierarchical
from .randomized import build_random

__all__ = [
    "build",
    "build_binary",
    "build_matrix",
    "build_multidim",
    "build_std",
    "build_cr",
    "build_cr_backtrack",
    "build_cr_special2",
    "build_cr_special3",
    "build_hierarchical",
    "build_random",
    "gamma",
    "method_specs",
    "parse_method_spec",
]


def parse_method_spec(spec: str) -> tuple[str, dict]:
    """Split a method spec like "multidim:4" into (method, extra kwargs)."""
    name, _, arg = spec.partition(":")
    if name == "multidim":
        dims = int(arg) if arg else 3
        return name, {"dims": dims}
    if arg:
        raise BadInputError(f"method {name!r} takes no parameter suffix")
    return name, {}


def method_specs(differentiate: int) -> list[str]:
    """Method specs worth attempting at a given D (feasibility still applies)."""
    specs = ["matrix", "multidim:3", "multidim:4", "binary", "hierarchical", "random", "std", "cr", "cr_backtrack"]
    if differentiate == 2:
        specs.append("cr_special2")
    if differentiate == 3:
        specs.append("cr_special3")
    return specs


def build(
    method: str,
    samples: int,
    differentiate: int,
    seed: int = 0,
    dims: int | None = None,
    trials: int = 5,
    fitness_budget: int | None = None,
    fitness_draws: int | None = None,
) -> Design:
    """Build a design by method name; `seed` only affects `random`."""
    name, extra = parse_method_spec(method)
    if dims is not None:
        extra["dims"] = dims
    if name == "matrix":
        return build_matrix(samples, differentiate)
    if name == "multidim":
        return build_multidim(samples, extra.get("dims", 3), differentiate)
    if name == "binary":
        return build_binary(samples, differentiate)
    if name == "hierarchical":
        return build_hierarchical(samples, differentiate)
    if name == "random":
        return build_random(
            samples,
            differentiate,
            seed,
            trials=trials,
            fitness_budget=fitness_budget,
            fitness_draws=fitness_draws,
        )
    if name == "std":
        return build_std(samples, differentiate)
    if name == "cr":
        return build_cr(samples, differentiate)
    if name == "cr_backtrack":
        return build_cr_backtrack(samples, differentiate)
    if name == "cr_special2":
        if differentiate != 2:
            raise BadInputError("cr_special2 resolves exactly 2 positives; differentiate must be 2")
        return build_cr_special2(samples)
    if name == "cr_special3":
        if differentiate != 3:
            raise BadInputError("cr_special3 resolves exactly 3 positives; differentiate must be 3")
        return build_cr_special3(samples)
    raise BadInputError(f"unknown method {method!r}")
