"""Objective contract, score conventions, classification metrics and run logs.

All optimizers in this package minimise. Metrics that should be maximised
(macro-F1) are passed through :func:`wrap_maximize` first.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded, DomainError, EvaluationError, UsageError


def wrap_maximize(metric_value: float) -> float:
    """Turn a larger-is-better metric into a minimisation score."""
    metric_value = float(metric_value)
    if not math.isfinite(metric_value):
        raise DomainError(f"metric value must be finite, got {metric_value}")
    return -metric_value + 0.0


# --------------------------------------------------------------------------
# classification metrics


@dataclass(frozen=True)
class ConfusionCounts:
    """Per-class true positive, false positive and false negative counts."""

    tp: tuple[int, ...]
    fp: tuple[int, ...]
    fn: tuple[int, ...]

    def __post_init__(self):
        if not len(self.tp) == len(self.fp) == len(self.fn):
            raise UsageError("tp, fp and fn must have one entry per class")
        for name in ("tp", "fp", "fn"):
            vals = tuple(int(v) for v in getattr(self, name))
            if any(v < 0 for v in vals):
                raise UsageError(f"{name} counts must be non-negative")
            object.__setattr__(self, name, vals)

    @property
    def n_classes(self) -> int:
        return len(self.tp)

    @classmethod
    def from_labels(cls, y_true, y_pred, n_classes: int) -> "ConfusionCounts":
        y_true = np.asarray(y_true, dtype=int)
        y_pred = np.asarray(y_pred, dtype=int)
        if y_true.shape != y_pred.shape:
            raise UsageError("label arrays differ in shape")
        tp, fp, fn = [], [], []
        for c in range(n_classes):
            t, p = y_true == c, y_pred == c
            tp.append(int(np.sum(t & p)))
            fp.append(int(np.sum(~t & p)))
            fn.append(int(np.sum(t & ~p)))
        return cls(tuple(tp), tuple(fp), tuple(fn))


def _ratio(num: int, den: int) -> float:
    # zero-denominator convention: quotient is 0
    return num / den if den else 0.0


def _check_class(counts: ConfusionCounts, c: int):
    if not 0 <= c < counts.n_classes:
        raise UsageError(f"class {c} not in counts with {counts.n_classes} classes")


def precision(counts: ConfusionCounts, c: int) -> float:
    _check_class(counts, c)
    return _ratio(counts.tp[c], counts.tp[c] + counts.fp[c])


def recall(counts: ConfusionCounts, c: int) -> float:
    _check_class(counts, c)
    return _ratio(counts.tp[c], counts.tp[c] + counts.fn[c])


def f1(counts: ConfusionCounts, c: int) -> float:
    p, r = precision(counts, c), recall(counts, c)
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def macro_f1(counts: ConfusionCounts) -> float:
    """Unweighted mean of the per-class F1 scores."""
    if counts.n_classes == 0:
        raise UsageError("macro_f1 needs at least one class")
    return sum(f1(counts, c) for c in range(counts.n_classes)) / counts.n_classes


# --------------------------------------------------------------------------
# trial logs


@dataclass(frozen=True)
class TrialRecord:
    strategy: str
    trial_index: int
    gamma: tuple[float, ...]
    score: float
    wall_time: float = 0.0


@dataclass
class RunHistory:
    """Ordered evaluation log of one optimizer run.

    ``best_so_far[i]`` is the minimum score over ``trials[:i + 1]``.
    """

    trials: list[TrialRecord] = field(default_factory=list)
    best_so_far: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.trials)

    def record(self, record: TrialRecord) -> "RunHistory":
        if record.trial_index != len(self.trials):
            raise UsageError(
                f"trial index {record.trial_index} out of order; expected {len(self.trials)}"
            )
        if not math.isfinite(record.score):
            raise DomainError(f"trial {record.trial_index}: score must be finite, got {record.score}")
        best = record.score if not self.best_so_far else min(self.best_so_far[-1], record.score)
        self.trials.append(record)
        self.best_so_far.append(best)
        return self

    def add(self, strategy: str, gamma, score: float, wall_time: float = 0.0) -> TrialRecord:
        """Append an evaluation as the next trial and return its record."""
        rec = TrialRecord(strategy, len(self.trials), tuple(float(v) for v in gamma), float(score), wall_time)
        self.record(rec)
        return rec

    @property
    def best(self) -> TrialRecord:
        if not self.trials:
            raise UsageError("empty history has no best trial")
        return min(self.trials, key=lambda t: (t.score, t.trial_index))

    @property
    def best_score(self) -> float:
        if not self.best_so_far:
            raise UsageError("empty history has no best score")
        return self.best_so_far[-1]

    @property
    def scores(self) -> list[float]:
        return [t.score for t in self.trials]


def record_trial(history: RunHistory, record: TrialRecord) -> RunHistory:
    return history.record(record)


# --------------------------------------------------------------------------
# objectives


class Objective:
    """Callable mapping a hyperparameter vector to a score (lower is better).

    Subclasses implement :meth:`evaluate`. Implementations must be safe to
    call from several threads at once.
    """

    descriptor = "objective"

    def __init__(self, n_dims: int, descriptor: str | None = None):
        self.n_dims = int(n_dims)
        if descriptor is not None:
            self.descriptor = descriptor

    def evaluate(self, gamma: np.ndarray) -> float:
        raise NotImplementedError

    def __call__(self, gamma) -> float:
        gamma = np.asarray(gamma, dtype=float)
        if gamma.shape != (self.n_dims,):
            raise UsageError(f"{self.descriptor}: expected {self.n_dims} values, got shape {gamma.shape}")
        return float(self.evaluate(gamma))


class FunctionObjective(Objective):
    def __init__(self, fn: Callable[[np.ndarray], float], n_dims: int, descriptor: str):
        super().__init__(n_dims, descriptor)
        self.fn = fn

    def evaluate(self, gamma):
        return self.fn(gamma)


class CountingObjective(Objective):
    """Wrapper that counts calls and optionally enforces a hard budget."""

    def __init__(self, inner: Objective, budget: int | None = None):
        super().__init__(inner.n_dims, inner.descriptor)
        self.inner = inner
        self.budget = budget
        self.calls = 0
        self._lock = threading.Lock()

    def evaluate(self, gamma):
        with self._lock:
            if self.budget is not None and self.calls >= self.budget:
                raise BudgetExceeded(f"{self.descriptor}: budget of {self.budget} evaluations exhausted")
            self.calls += 1
        return self.inner(gamma)


def sphere(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x))


def rastrigin(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def rosenbrock(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


SYNTHETIC = {"sphere": sphere, "rastrigin": rastrigin, "rosenbrock": rosenbrock}


def synthetic_objective(name: str, n_dims: int) -> FunctionObjective:
    try:
        fn = SYNTHETIC[name]
    except KeyError:
        raise UsageError(f"unknown synthetic objective {name!r}; choose from {sorted(SYNTHETIC)}") from None
    return FunctionObjective(fn, n_dims, f"{name}-{n_dims}d")


def timed_eval(objective: Objective, gamma, *, strategy=None, trial_index=None) -> tuple[float, float]:
    """Evaluate once, returning ``(score, seconds)``.

    Any failure is re-raised as :class:`EvaluationError` with trial context;
    :class:`BudgetExceeded` passes through untouched.
    """
    t0 = time.perf_counter()
    try:
        score = objective(gamma)
    except (BudgetExceeded, EvaluationError):
        raise
    except Exception as exc:
        raise EvaluationError(
            f"{type(exc).__name__}: {exc}", strategy=strategy, trial_index=trial_index, gamma=gamma
        ) from exc
    if not math.isfinite(score):
        raise EvaluationError(
            f"objective returned non-finite score {score}", strategy=strategy, trial_index=trial_index, gamma=gamma
        )
    return score, time.perf_counter() - t0
