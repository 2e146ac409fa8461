import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from hbrkga.errors import UsageError
from hbrkga.objective import RunHistory
from hbrkga.stats import (
    exact_p_value,
    mean_curve,
    mean_of_curves,
    midranks,
    rank_sum_test,
    summarize,
    summarize_values,
    u_distribution,
)


def brute_force_p(a, b):
    """Two-sided exact p by enumerating every split of the pooled ranks."""
    pooled = sorted(a + b)
    rank = {v: i + 1 for i, v in enumerate(pooled)}
    n, N = len(a), len(a) + len(b)
    u_obs = sum(rank[v] for v in a) - n * (n + 1) / 2
    us = [sum(c) - n * (n + 1) / 2 for c in itertools.combinations(range(1, N + 1), n)]
    lower = sum(u <= u_obs for u in us) / len(us)
    upper = sum(u >= u_obs for u in us) / len(us)
    return min(1.0, 2 * min(lower, upper))


def hist(scores):
    h = RunHistory()
    for s in scores:
        h.add("s", (0.0,), s)
    return h


def test_summarize():
    s = summarize([hist([0.5, 0.1]), hist([0.3])])
    assert s.bests == (0.1, 0.3)
    assert s.mean == pytest.approx(0.2)
    assert s.std == pytest.approx(math.sqrt(0.02))
    assert s.std == pytest.approx(0.1414, abs=1e-4)


def test_summarize_single_run_has_no_std():
    assert summarize([hist([0.4])]).std is None


def test_summarize_identical_runs():
    assert summarize([hist([0.2])] * 10).std == 0.0


def test_summarize_empty():
    with pytest.raises(UsageError):
        summarize([])


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30))
def test_summarize_two_pass_oracle(xs):
    s = summarize_values(xs)
    mean = sum(xs) / len(xs)
    var = sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)
    assert s.mean == pytest.approx(mean, abs=1e-12 * max(1.0, max(map(abs, xs))))
    assert s.std == pytest.approx(math.sqrt(var), abs=1e-9)


def test_midranks():
    assert midranks([3.0, 1.0, 3.0, 2.0]) == [3.5, 1.0, 3.5, 2.0]


def test_u_distribution_totals():
    for n in range(0, 7):
        for m in range(0, 7):
            assert sum(u_distribution(n, m)) == math.comb(n + m, n)


def test_exact_separated_samples():
    res = rank_sum_test([1, 2, 3], [10, 11, 12])
    assert res.method == "exact"
    assert res.p_value == pytest.approx(0.1, abs=1e-15)
    assert not res.reject


def test_identical_samples():
    res = rank_sum_test([1, 2, 3], [1, 2, 3])
    assert res.p_value == 1.0 and not res.reject


def test_all_values_identical():
    res = rank_sum_test([5, 5, 5], [5, 5, 5, 5])
    assert res.p_value == 1.0 and not res.reject


def test_too_small():
    with pytest.raises(UsageError):
        rank_sum_test([1, 2], [3, 4, 5])


def test_exact_matches_brute_force_all_small_cases():
    for n in range(3, 8):
        for m in range(3, 11 - n):
            for pos in itertools.combinations(range(n + m), n):
                a = [float(i) for i in pos]
                b = [float(i) for i in range(n + m) if i not in pos]
                got = rank_sum_test(a, b).p_value
                assert abs(got - brute_force_p(a, b)) <= 1e-12


def test_exact_matches_scipy():
    rng = random.Random(0)
    for _ in range(50):
        n, m = rng.randint(3, 6), rng.randint(3, 6)
        vals = rng.sample(range(1000), n + m)
        a, b = vals[:n], vals[n:]
        ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="exact").pvalue
        assert rank_sum_test(a, b).p_value == pytest.approx(ref, abs=1e-12)


def test_normal_approximation_matches_scipy():
    rng = random.Random(1)
    for _ in range(30):
        a = [rng.randint(0, 8) for _ in range(10)]
        b = [rng.randint(2, 10) for _ in range(10)]
        if len(set(a + b)) == 1:
            continue
        res = rank_sum_test(a, b)
        ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True).pvalue
        assert res.method == "normal"
        assert res.p_value == pytest.approx(ref, rel=1e-9)


def test_ties_force_normal_even_when_small():
    assert rank_sum_test([1, 2, 2], [3, 4, 5]).method == "normal"


samples = st.lists(st.integers(-50, 50), min_size=3, max_size=12)


@given(samples, samples)
def test_symmetric_and_in_range(a, b):
    p1 = rank_sum_test(a, b).p_value
    p2 = rank_sum_test(b, a).p_value
    assert 0 < p1 <= 1
    assert p1 == pytest.approx(p2, abs=1e-15)


def test_reject_flag():
    res = rank_sum_test(list(range(10)), list(range(100, 110)), alpha=0.05)
    assert res.reject and res.p_value < 0.05


def test_exact_p_value_helper():
    assert exact_p_value(0, 3, 3) == pytest.approx(0.1)
    assert exact_p_value(4.5, 3, 3) == 1.0


def test_mean_curve():
    h = hist([0.5, 0.3, 0.4])
    assert mean_curve([h]) == h.best_so_far
    assert mean_of_curves([[0.2] * 4, [0.4] * 4]) == pytest.approx([0.3] * 4)
    with pytest.raises(UsageError):
        mean_curve([hist([1.0]), hist([1.0, 2.0])])
    with pytest.raises(UsageError):
        mean_curve([])


@given(st.lists(st.lists(st.floats(-100, 100), min_size=5, max_size=5), min_size=1, max_size=8))
def test_mean_curve_monotone(raws):
    hs = [hist(r) for r in raws]
    curve = mean_curve(hs)
    assert all(a >= b - 1e-12 for a, b in zip(curve, curve[1:]))
