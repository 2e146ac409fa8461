import math
import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hbrkga.errors import BudgetExceeded, DomainError, EvaluationError, UsageError
from hbrkga.objective import (
    ConfusionCounts,
    CountingObjective,
    FunctionObjective,
    RunHistory,
    TrialRecord,
    f1,
    macro_f1,
    precision,
    rastrigin,
    recall,
    record_trial,
    rosenbrock,
    sphere,
    synthetic_objective,
    timed_eval,
    wrap_maximize,
)


def counts1(tp, fp, fn):
    return ConfusionCounts((tp,), (fp,), (fn,))


def test_wrap_maximize():
    assert wrap_maximize(1.0) == -1.0
    assert wrap_maximize(0.0) == 0.0
    assert math.copysign(1, wrap_maximize(0.0)) == 1
    with pytest.raises(DomainError):
        wrap_maximize(math.nan)


@given(st.lists(st.floats(-1e9, 1e9), min_size=1, max_size=50))
def test_wrap_maximize_preserves_argmax(values):
    wrapped = [wrap_maximize(v) for v in values]
    assert int(np.argmin(wrapped)) == int(np.argmax(values))


@pytest.mark.parametrize("tp, fp, expected", [(5, 0, 1.0), (8, 2, 0.8), (0, 0, 0.0)])
def test_precision(tp, fp, expected):
    assert precision(counts1(tp, fp, 0), 0) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("tp, fn, expected", [(5, 0, 1.0), (8, 1, 8 / 9), (0, 0, 0.0)])
def test_recall(tp, fn, expected):
    assert recall(counts1(tp, 0, fn), 0) == pytest.approx(expected, abs=1e-15)


def test_macro_f1_single_class_hand_value():
    # 2 * 0.8 * 8/9 / (0.8 + 8/9) = (64/45) / (76/45) = 16/19
    assert macro_f1(counts1(8, 2, 1)) == pytest.approx(16 / 19, abs=1e-15)
    assert macro_f1(counts1(8, 2, 1)) == pytest.approx(0.8421, abs=5e-5)


def test_macro_f1_is_unweighted_mean():
    c = ConfusionCounts((10, 8, 0), (0, 2, 3), (0, 1, 4))
    assert macro_f1(c) == pytest.approx((1.0 + 16 / 19 + 0.0) / 3)


def test_macro_f1_perfect_and_empty():
    assert macro_f1(ConfusionCounts((4, 7), (0, 0), (0, 0))) == 1.0
    with pytest.raises(UsageError):
        macro_f1(ConfusionCounts((), (), ()))


def test_bad_class_index():
    with pytest.raises(UsageError):
        precision(counts1(1, 1, 1), 1)


def test_counts_from_labels():
    c = ConfusionCounts.from_labels([0, 0, 1, 1, 2], [0, 1, 1, 1, 0], 3)
    assert c.tp == (1, 2, 0)
    assert c.fp == (1, 1, 0)
    assert c.fn == (1, 0, 1)


def test_negative_counts_rejected():
    with pytest.raises(UsageError):
        counts1(-1, 0, 0)


nonneg = st.integers(0, 1000)
class_counts = st.lists(st.tuples(nonneg, nonneg, nonneg), min_size=1, max_size=6)


@given(class_counts)
def test_metrics_in_unit_interval(rows):
    c = ConfusionCounts(*zip(*rows))
    for k in range(c.n_classes):
        for v in (precision(c, k), recall(c, k), f1(c, k)):
            assert 0.0 <= v <= 1.0
    assert 0.0 <= macro_f1(c) <= 1.0


@given(class_counts)
def test_macro_f1_one_iff_perfect(rows):
    c = ConfusionCounts(*zip(*rows))
    perfect = all(tp > 0 and fp == 0 and fn == 0 for tp, fp, fn in rows)
    assert (macro_f1(c) == 1.0) == perfect


# --- run history -------------------------------------------------------------


def rec(i, score):
    return TrialRecord("s", i, (0.0,), score)


def test_best_so_far_running_min():
    h = RunHistory()
    for i, s in enumerate([0.5, 0.3, 0.4]):
        record_trial(h, rec(i, s))
    assert h.best_so_far == [0.5, 0.3, 0.3]
    assert h.best.trial_index == 1


def test_first_record():
    h = record_trial(RunHistory(), rec(0, 2.0))
    assert h.best_so_far == [2.0]


def test_out_of_order_record():
    h = RunHistory()
    with pytest.raises(UsageError):
        h.record(rec(1, 0.0))


def test_non_finite_score_rejected():
    with pytest.raises(DomainError):
        RunHistory().record(rec(0, math.inf))


def test_240_random_records():
    rng = np.random.default_rng(3)
    scores = rng.normal(size=240)
    h = RunHistory()
    for i, s in enumerate(scores):
        h.record(rec(i, float(s)))
    assert len(h) == 240 and len(h.best_so_far) == 240
    assert all(a >= b for a, b in zip(h.best_so_far, h.best_so_far[1:]))
    assert h.best_so_far[-1] == scores.min()


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=100))
def test_best_so_far_property(scores):
    h = RunHistory()
    for s in scores:
        h.add("s", (0.0,), s)
    assert all(a >= b for a, b in zip(h.best_so_far, h.best_so_far[1:]))
    assert h.best_score == min(scores)


# --- synthetic objectives --------------------------------------------------------


def test_synthetic_values():
    assert sphere([0, 0, 0]) == 0
    assert rastrigin([0, 0, 0, 0, 0]) == 0
    assert sphere([1, 2]) == 5
    assert rosenbrock([1, 1, 1]) == 0
    # 10n + sum(x^2 - 10 cos(2 pi x)) at x = (1, 0.5): 20 + (1 - 10) + (0.25 + 10)
    assert rastrigin([1, 0.5]) == pytest.approx(21.25)


def test_synthetic_objective_contract():
    obj = synthetic_objective("sphere", 2)
    assert obj([1, 2]) == 5.0
    with pytest.raises(UsageError):
        obj([1, 2, 3])
    with pytest.raises(UsageError):
        synthetic_objective("ackley", 2)


def test_counting_objective_budget():
    obj = CountingObjective(synthetic_objective("sphere", 1), budget=3)
    for _ in range(3):
        obj([1.0])
    assert obj.calls == 3
    with pytest.raises(BudgetExceeded):
        obj([1.0])


def test_counting_objective_threadsafe():
    obj = CountingObjective(synthetic_objective("sphere", 1))
    threads = [threading.Thread(target=lambda: [obj([0.5]) for _ in range(200)]) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert obj.calls == 1600


def test_timed_eval_wraps_failures():
    def boom(x):
        raise ZeroDivisionError("nope")

    obj = FunctionObjective(boom, 1, "boom")
    with pytest.raises(EvaluationError) as err:
        timed_eval(obj, [0.25], strategy="random", trial_index=4)
    assert err.value.trial_index == 4 and err.value.gamma == (0.25,)
    assert "ZeroDivisionError" in str(err.value)

    nan = FunctionObjective(lambda x: math.nan, 1, "nan")
    with pytest.raises(EvaluationError):
        timed_eval(nan, [0.0])
