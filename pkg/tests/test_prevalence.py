from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pooldesign.errors import BadInputError
from pooldesign.prevalence import (
    NOT_ADVISABLE,
    error_prob_exact,
    error_prob_normal,
    error_prob_split,
    error_rate_report,
    recommend,
    split_parts,
)


def _fraction_tail(samples: int, prevalence: Fraction, differentiate: int) -> Fraction:
    """Exact rational binomial upper tail, the independent reference."""
    tail = Fraction(0)
    for k in range(differentiate + 1, samples + 1):
        tail += (
            math.comb(samples, k)
            * prevalence**k
            * (1 - prevalence) ** (samples - k)
        )
    return tail


@pytest.mark.parametrize(
    "samples,num,den,differentiate",
    [(20, 2, 100, 4), (100, 2, 100, 1), (100, 2, 100, 4), (50, 1, 50, 2), (7, 1, 3, 2)],
)
def test_exact_tail_matches_rational_oracle(
    samples: int, num: int, den: int, differentiate: int
) -> None:
    got = error_prob_exact(samples, num / den, differentiate)
    want = float(_fraction_tail(samples, Fraction(num, den), differentiate))
    assert got == pytest.approx(want, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=60),
    st.integers(min_value=0, max_value=6),
    st.fractions(min_value=0, max_value=1, max_denominator=50),
)
def test_exact_tail_property(samples: int, differentiate: int, prevalence: Fraction) -> None:
    got = error_prob_exact(samples, float(prevalence), differentiate)
    want = float(_fraction_tail(samples, prevalence, differentiate))
    assert got == pytest.approx(want, abs=1e-10)
    assert 0.0 <= got <= 1.0


def test_exact_tail_edges() -> None:
    assert error_prob_exact(10, 0.0, 2) == 0.0
    assert error_prob_exact(10, 1.0, 2) == 1.0
    assert error_prob_exact(10, 0.3, 10) == 0.0
    assert error_prob_exact(10, 0.3, 99) == 0.0
    # capacity 0 fails exactly when any sample is positive
    assert error_prob_exact(10, 0.5, 0) == pytest.approx(1 - 0.5**10, abs=1e-12)


def test_exact_tail_monotone_in_each_argument() -> None:
    rhos = (0.0, 0.005, 0.01, 0.02, 0.05, 0.1)
    for samples in (20, 50, 100):
        for differentiate in range(0, 5):
            values = [error_prob_exact(samples, r, differentiate) for r in rhos]
            assert values == sorted(values)
    for differentiate in range(0, 5):
        by_s = [error_prob_exact(s, 0.02, differentiate) for s in (20, 50, 100)]
        assert by_s == sorted(by_s)
    for samples in (20, 50, 100):
        by_d = [error_prob_exact(samples, 0.02, d) for d in range(0, 5)]
        assert by_d == sorted(by_d, reverse=True)


def test_input_validation() -> None:
    with pytest.raises(BadInputError):
        error_prob_exact(0, 0.1, 1)
    with pytest.raises(BadInputError):
        error_prob_exact(10, -0.1, 1)
    with pytest.raises(BadInputError):
        error_prob_exact(10, 1.1, 1)
    with pytest.raises(BadInputError):
        error_prob_exact(10, 0.1, -1)


def test_normal_approximation_tracks_exact() -> None:
    assert error_prob_normal(100, 0.02, 2) == pytest.approx(0.5, abs=1e-12)
    for differentiate in (1, 2, 3, 4):
        exact = error_prob_exact(100, 0.02, differentiate)
        normal = error_prob_normal(100, 0.02, differentiate)
        assert exact / 3 <= normal <= exact * 3
    with pytest.raises(BadInputError):
        error_prob_normal(10, 0.0, 1)
    with pytest.raises(BadInputError):
        error_prob_normal(10, 1.0, 1)


def test_split_parts_preserve_sums_and_pair_remainders() -> None:
    assert split_parts(100, 0, 4) == [(25, 0)] * 4
    assert split_parts(10, 5, 3) == [(4, 2), (3, 2), (3, 1)]
    for samples, differentiate, splits in ((17, 4, 3), (9, 2, 4), (100, 8, 6)):
        parts = split_parts(samples, differentiate, splits)
        assert sum(size for size, _ in parts) == samples
        assert sum(budget for _, budget in parts) == differentiate
        sizes = [size for size, _ in parts]
        budgets = [budget for _, budget in parts]
        assert sizes == sorted(sizes, reverse=True)
        assert budgets == sorted(budgets, reverse=True)
        assert max(sizes) - min(sizes) <= 1


def test_single_split_is_identity() -> None:
    for samples, rho, differentiate in ((40, 0.03, 2), (100, 0.02, 4), (20, 0.1, 1)):
        split = error_prob_split(samples, rho, differentiate, 1)
        direct = error_prob_exact(samples, rho, differentiate)
        assert abs(split["exact"] - direct) <= 1e-12
        assert abs(split["first_order"] - direct) <= 1e-12
        assert split["parts"] == [
            {"samples": samples, "differentiate": differentiate, "error_prob": direct}
        ]


def test_split_frozen_case_and_first_order_bound() -> None:
    split = error_prob_split(100, 0.02, 8, 4)
    assert [(p["samples"], p["differentiate"]) for p in split["parts"]] == [(25, 2)] * 4
    assert split["exact"] == pytest.approx(0.05193064231782418, abs=1e-12)
    assert split["first_order"] == pytest.approx(0.05297371243323752, abs=1e-12)
    assert split["first_order"] >= split["exact"]
    with pytest.raises(BadInputError):
        error_prob_split(4, 0.02, 1, 5)


def test_error_rate_report_bundles_views() -> None:
    report = error_rate_report(40, 0.03, 2, 1)
    assert report["samples"] == 40
    assert report["splits"] == 1
    assert report["approximation"] is True
    assert report["exact"] == pytest.approx(error_prob_exact(40, 0.03, 2), abs=1e-12)
    assert report["normal"] == pytest.approx(error_prob_normal(40, 0.03, 2), abs=1e-12)
    zero = error_rate_report(40, 0.0, 2, 1)
    assert zero["normal"] is None
    assert zero["approximation"] is False
    assert zero["exact"] == 0.0


def test_recommend_small_batch_stays_whole() -> None:
    plan = recommend(20, 0.02, 1e-3, with_comparison=False)
    assert plan["advisable"] is True
    assert plan["differentiate"] == 3
    assert plan["splits"] == 1
    assert plan["part_samples"] == 20
    assert plan["error_prob"] == pytest.approx(0.0005996788962465755, abs=1e-12)
    assert plan["note"] is None
    assert "comparison" not in plan


def test_recommend_splits_when_one_batch_cannot_meet_tolerance() -> None:
    plan = recommend(100, 0.02, 1e-3, with_comparison=False)
    assert plan["advisable"] is True
    assert plan["differentiate"] == 4
    assert plan["splits"] == 4
    assert plan["part_samples"] == 25
    assert plan["error_prob"] == pytest.approx(0.00048660532618649555, abs=1e-12)


def test_recommend_zero_prevalence_trivial_plan() -> None:
    plan = recommend(100, 0.0, 0.5, with_comparison=False)
    assert plan["advisable"] is True
    assert plan["differentiate"] == 1
    assert plan["splits"] == 1
    assert plan["error_prob"] == 0.0


def test_recommend_refuses_high_prevalence() -> None:
    plan = recommend(100, 0.2, 1e-2, with_comparison=False)
    assert plan["advisable"] is False
    assert plan["differentiate"] is None
    assert plan["note"].startswith(NOT_ADVISABLE)
    assert "0.2" in plan["note"]


def test_recommend_refuses_hopeless_tolerance() -> None:
    plan = recommend(5, 0.05, 1e-6, with_comparison=False)
    assert plan["advisable"] is False
    assert plan["note"].startswith(NOT_ADVISABLE)


def test_recommend_embeds_method_comparison_for_part_size() -> None:
    plan = recommend(20, 0.02, 1e-3)
    table = plan["comparison"]
    assert table["samples"] == plan["part_samples"] == 20
    assert table["differentiate"] == plan["differentiate"] == 3
    assert any(row["method"] == "std" for row in table["rows"])


def test_recommend_validates_tolerance() -> None:
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(BadInputError):
            recommend(10, 0.01, bad)
