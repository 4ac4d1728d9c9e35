import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import mannwhitneyu
from statsmodels.stats.inter_rater import cohens_kappa
from statsmodels.stats.proportion import proportion_confint

from altmon.analytics.stats import bucket, cohen_kappa, cut_points, mann_whitney_u, mean_ci, rankdata, wilson_ci
from altmon.errors import EmptySample, InvalidCounts, LengthMismatch


def test_wilson_examples():
    assert wilson_ci(0, 10)[0] == 0.0
    lo, hi = wilson_ci(5, 10)
    assert lo == pytest.approx(0.2366, abs=5e-5) and hi == pytest.approx(0.7634, abs=5e-5)


@pytest.mark.parametrize("n", [1, 2, 7, 10, 50, 200, 1001])
def test_wilson_matches_statsmodels(n):
    for k in sorted({0, 1, n // 3, n // 2, n - 1, n}):
        ours = wilson_ci(k, n)
        ref = proportion_confint(k, n, alpha=0.05, method="wilson")
        assert ours == pytest.approx(ref, abs=1e-12)
        for level in (0.9, 0.99):
            assert wilson_ci(k, n, level) == pytest.approx(proportion_confint(k, n, 1 - level, "wilson"), abs=1e-12)


def test_wilson_symmetry_and_errors():
    for k in range(11):
        lo, hi = wilson_ci(k, 10)
        lo2, hi2 = wilson_ci(10 - k, 10)
        assert lo == pytest.approx(1 - hi2, abs=1e-15) and hi == pytest.approx(1 - lo2, abs=1e-15)
    for bad in ((1, 0), (-1, 5), (6, 5)):
        with pytest.raises(InvalidCounts):
            wilson_ci(*bad)


def test_mann_whitney_examples():
    r = mann_whitney_u([1, 2, 3], [4, 5, 6])
    assert r.statistic == 0 and r.pvalue == pytest.approx(0.1) and r.method == "mann-whitney-exact"
    assert mann_whitney_u([1], [1]).statistic == 0.5
    same = [3, 1, 4, 1, 5]
    assert mann_whitney_u(same, same).statistic == len(same) ** 2 / 2
    with pytest.raises(EmptySample):
        mann_whitney_u([], [1])


def test_rankdata_midranks():
    assert rankdata([10, 20, 10, 30]) == [1.5, 3.0, 1.5, 4.0]


def _samples(rng, n1, n2, ties):
    pool = list(range(5)) if ties else rng.sample(range(1000), n1 + n2)
    if ties:
        return [rng.choice(pool) for _ in range(n1)], [rng.choice(pool) for _ in range(n2)]
    return pool[:n1], pool[n1:]


@pytest.mark.parametrize("n1, n2", [(1, 1), (2, 3), (3, 3), (4, 6), (6, 6), (5, 7)])
def test_mann_whitney_exact_matches_scipy(n1, n2):
    rng = random.Random(n1 * 10 + n2)
    for _ in range(20):
        a, b = _samples(rng, n1, n2, ties=False)
        ours = mann_whitney_u(a, b)
        ref = mannwhitneyu(a, b, alternative="two-sided", method="exact")
        assert ours.statistic == ref.statistic
        assert ours.pvalue == pytest.approx(ref.pvalue, abs=1e-12)


@pytest.mark.parametrize("n1, n2", [(3, 4), (8, 9), (30, 25), (100, 3)])
def test_mann_whitney_normal_matches_scipy(n1, n2):
    rng = random.Random(n1 + 1000 * n2)
    for ties in (True, False):
        for _ in range(20):
            a, b = _samples(rng, n1, n2, ties)
            ours = mann_whitney_u(a, b)
            if ours.method != "mann-whitney-normal":
                continue
            ref = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
            assert ours.statistic == ref.statistic
            assert ours.pvalue == pytest.approx(ref.pvalue, abs=1e-12)


def test_mann_whitney_all_tied_gives_p_one():
    r = mann_whitney_u([2] * 7, [2] * 8)
    assert r.pvalue == 1.0 and r.statistic == 28


def test_mann_whitney_p_in_range():
    rng = random.Random(1)
    for _ in range(200):
        a = [rng.randrange(6) for _ in range(rng.randrange(1, 9))]
        b = [rng.randrange(6) for _ in range(rng.randrange(1, 9))]
        assert 0.0 <= mann_whitney_u(a, b).pvalue <= 1.0


def _kappa_ref(a, b):
    table = np.zeros((2, 2))
    for x, y in zip(a, b):
        table[int(x), int(y)] += 1
    return cohens_kappa(table, return_results=False)


def test_kappa_examples():
    assert cohen_kappa([1, 0, 1, 1], [1, 0, 1, 1]).statistic == 1.0
    assert cohen_kappa([1, 1, 0, 0], [1, 0, 1, 0]).statistic == 0.0
    assert cohen_kappa([1, 0], [0, 1]).statistic == -1.0
    assert cohen_kappa([1, 1], [1, 1]).statistic == 1.0
    with pytest.raises(LengthMismatch):
        cohen_kappa([1], [1, 0])
    with pytest.raises(LengthMismatch):
        cohen_kappa([], [])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=2, max_size=60))
def test_kappa_matches_statsmodels(pairs):
    a, b = [x for x, _ in pairs], [y for _, y in pairs]
    if len(set(a)) == 1 and len(set(b)) == 1:   # p_e = 1, covered by the examples above
        return
    ref = _kappa_ref(a, b)
    assert cohen_kappa(a, b).statistic == pytest.approx(ref, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=80), st.sampled_from([2, 4, 5, 10, 20]))
def test_cut_points_match_inverted_cdf(values, groups):
    cuts = cut_points(values, groups)
    ref = [np.quantile(values, i / groups, method="inverted_cdf") for i in range(1, groups)]
    assert cuts == list(ref)
    for v in values:
        b = bucket(v, cuts)
        assert 0 <= b < groups
        assert b == sum(1 for c in cuts if c < v)


def test_ten_distinct_values_one_per_group():
    cuts = cut_points(list(range(10)), 10)
    assert sorted(bucket(v, cuts) for v in range(10)) == list(range(10))


def test_mean_ci():
    m, lo, hi = mean_ci([1.0, 2.0, 3.0, 4.0])
    assert m == 2.5 and lo < m < hi
    assert mean_ci([5.0]) == (5.0, 5.0, 5.0)
    assert all(np.isnan(mean_ci([])))


def test_exact_enumeration_is_symmetric():
    for n1, n2 in itertools.product(range(1, 5), repeat=2):
        a, b = list(range(n1)), list(range(n1, n1 + n2))
        assert mann_whitney_u(a, b).pvalue == pytest.approx(mann_whitney_u(b, a).pvalue)
