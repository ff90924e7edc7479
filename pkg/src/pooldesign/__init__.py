"""Pooled-testing toolkit: design construction, decoding, and evaluation."""
from __future__ import annotations

__version__ = "0.1.0"

from .core import (
    Adaptivity,
    Design,
    Round,
    SCHEMA_VERSION,
    design_from_dict,
    design_from_json,
    design_to_dict,
    design_to_json,
    make_design,
    make_round,
)
from .constructors import build, method_specs, parse_method_spec
from .decode import DecodeOutcome, decode_round, parse_results, simulate
from .errors import (
    BadInputError,
    ErrorKind,
    InfeasibleError,
    InternalError,
    NotFoundError,
    PoolDesignError,
)
from .evaluate import DesignMetrics, compare_methods, metrics, rank_methods, verify_separable
from .prevalence import (
    error_prob_exact,
    error_prob_normal,
    error_prob_split,
    error_rate_report,
    recommend,
)
from .session import (
    SessionState,
    session_from_dict,
    session_from_json,
    session_start,
    session_submit,
    session_to_dict,
    session_to_json,
)

__all__ = [
    "Adaptivity",
    "BadInputError",
    "DecodeOutcome",
    "Design",
    "DesignMetrics",
    "ErrorKind",
    "InfeasibleError",
    "InternalError",
    "NotFoundError",
    "PoolDesignError",
    "Round",
    "SCHEMA_VERSION",
    "SessionState",
    "build",
    "compare_methods",
    "decode_round",
    "design_from_dict",
    "design_from_json",
    "design_to_dict",
    "design_to_json",
    "error_prob_exact",
    "error_prob_normal",
    "error_prob_split",
    "error_rate_report",
    "make_design",
    "make_round",
    "method_specs",
    "metrics",
    "parse_method_spec",
    "parse_results",
    "rank_methods",
    "recommend",
    "session_from_dict",
    "session_from_json",
    "session_start",
    "session_submit",
    "session_to_dict",
    "session_to_json",
    "simulate",
    "verify_separable",
    "__version__",
]
