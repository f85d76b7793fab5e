import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cbai.estimators import (
    ArmStatistics,
    SortedArrayStatistics,
    empirical_median,
    insert,
    sample_mean,
    trim_count,
    trimmed_mean,
)
from cbai.exceptions import ConfigError, StateError


def brute_trimmed(xs, alpha):
    s = sorted(xs)
    n = len(s)
    k = int(math.floor(alpha * n + 1e-9))
    return math.fsum(s[k:n - k]) / (n - 2 * k)


def brute_median(xs):
    return float(np.median(xs))


def test_trim_count():
    assert trim_count(0.05, 19) == 0
    assert trim_count(0.05, 20) == 1
    assert trim_count(0.1, 30) == 3
    # 0.29 * 100 evaluates to 28.999999999999996; the slack restores 29
    assert trim_count(0.29, 100) == 29
    assert trim_count(0.0, 1000) == 0
    with pytest.raises(ConfigError):
        trim_count(0.5, 10)


def test_small_examples():
    s = ArmStatistics(0.1, [1, 2, 3, 4, 5, 6, 7, 8, 9, 100])
    assert trimmed_mean(s, 0.1) == pytest.approx(5.5)
    assert s.mean() == pytest.approx(14.5)
    assert empirical_median(s) == 5.5
    assert trimmed_mean(s, 0.0) == pytest.approx(14.5)
    assert trimmed_mean(s, 0.2) == pytest.approx(5.5)
    s2 = ArmStatistics(0.0)
    insert(s2, 3.0)
    assert empirical_median(s2) == 3.0
    assert sample_mean(s2) == 3.0


def test_inert_trimming_below_one_over_alpha():
    xs = [0.0] * 18 + [1000.0]
    s = ArmStatistics(0.05, xs)
    assert s.trimmed_mean() == pytest.approx(1000.0 / 19)
    s.insert(0.0)
    assert s.trimmed_mean() == pytest.approx(0.0)


def test_errors():
    s = ArmStatistics(0.05)
    with pytest.raises(StateError):
        s.trimmed_mean()
    with pytest.raises(StateError):
        s.median()
    with pytest.raises(StateError):
        s.mean()
    with pytest.raises(ConfigError):
        s.insert(float("nan"))
    with pytest.raises(ConfigError):
        s.insert(float("inf"))
    with pytest.raises(ConfigError):
        ArmStatistics(-0.1)
    with pytest.raises(ConfigError):
        trimmed_mean(ArmStatistics(0.0, [1.0]), 0.5)


def test_select_rank_prefix():
    s = ArmStatistics(0.0, [5.0, 1.0, 3.0, 3.0])
    assert [s.select(i) for i in range(4)] == [1.0, 3.0, 3.0, 5.0]
    assert s.rank(3.0) == 1
    assert s.rank(4.0) == 3
    assert s.prefix_sum(0) == 0.0
    assert s.prefix_sum(3) == 7.0
    with pytest.raises(IndexError):
        s.select(4)
    with pytest.raises(IndexError):
        s.prefix_sum(5)


def test_randomised_insert_sequences_against_oracle():
    # 10^4 sequences; every prefix checked for the registered and one other trim fraction
    rng = np.random.default_rng(7)
    for seq in range(10_000):
        n = int(rng.integers(1, 40))
        alpha = float(rng.choice([0.0, 0.05, 0.1, 0.25, 0.45]))
        kind = seq % 4
        if kind == 0:
            xs = rng.normal(size=n)
        elif kind == 1:
            xs = rng.integers(-3, 4, size=n).astype(float)  # many ties
        elif kind == 2:
            xs = rng.standard_cauchy(size=n) * 100
        else:
            xs = np.where(rng.random(n) < 0.2, 50.0, rng.normal(size=n))
        s = ArmStatistics(alpha)
        seen = []
        for x in xs:
            s.insert(x)
            seen.append(float(x))
            scale = max(1.0, max(abs(v) for v in seen))
            assert s.trimmed_mean() == pytest.approx(brute_trimmed(seen, alpha), rel=1e-9, abs=1e-9 * scale)
            assert s.trimmed_mean(0.2) == pytest.approx(brute_trimmed(seen, 0.2), rel=1e-9, abs=1e-9 * scale)
            assert s.median() == brute_median(seen)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200), st.sampled_from([0.0, 0.05, 0.1, 0.3]))
@settings(max_examples=300)
def test_store_matches_reference_store(xs, alpha):
    a = ArmStatistics(alpha)
    b = SortedArrayStatistics(alpha)
    for x in xs:
        a.insert(x)
        b.insert(x)
    assert a.sorted_view() == b.sorted_view()
    assert a.count == b.count == len(xs)
    assert a.trimmed_mean() == pytest.approx(b.trimmed_mean(), rel=1e-9, abs=1e-6)
    assert a.median() == b.median()
    probe = xs[len(xs) // 2]
    assert a.rank(probe) == b.rank(probe)


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=100), st.sampled_from([0.0, 0.05, 0.2]))
def test_bulk_load_equals_incremental(xs, alpha):
    a = ArmStatistics(alpha, xs)
    b = ArmStatistics(alpha)
    for x in xs:
        b.insert(x)
    assert a.trimmed_mean() == pytest.approx(b.trimmed_mean(), rel=1e-9, abs=1e-9)


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=100), st.sampled_from([0.0, 0.05, 0.2]))
def test_estimates_lie_within_sample_range(xs, alpha):
    s = ArmStatistics(alpha, xs)
    lo, hi = min(xs), max(xs)
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    assert lo - tol <= s.trimmed_mean() <= hi + tol
    assert lo <= s.median() <= hi


@given(
    st.lists(st.floats(-100, 100), min_size=1, max_size=80),
    st.floats(-1000, 1000),
    st.floats(0.1, 10),
    st.sampled_from([0.0, 0.05, 0.2]),
)
def test_affine_equivariance(xs, shift, scale, alpha):
    a = ArmStatistics(alpha, xs)
    b = ArmStatistics(alpha, [scale * x + shift for x in xs])
    tol = 1e-7 * (abs(shift) + scale * 100 + 1)
    assert b.trimmed_mean() == pytest.approx(scale * a.trimmed_mean() + shift, abs=tol)
    assert b.median() == pytest.approx(scale * a.median() + shift, abs=tol)


@given(st.permutations(list(range(25))))
def test_insert_order_irrelevant(perm):
    xs = [float(x * x % 17) for x in perm]
    a = ArmStatistics(0.1, xs)
    b = ArmStatistics(0.1, sorted(xs))
    assert a.trimmed_mean() == pytest.approx(b.trimmed_mean())
