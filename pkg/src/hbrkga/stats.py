"""Multi-run summaries, the Wilcoxon rank-sum test and mean best-so-far curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import UsageError
from .objective import RunHistory

EXACT_MAX_TOTAL = 12


@dataclass(frozen=True)
class RunSummary:
    strategy: str
    bests: tuple[float, ...]
    mean: float
    std: float | None  # sample std; None for a single run


def summarize(histories: Sequence[RunHistory], strategy: str | None = None) -> RunSummary:
    if not histories:
        raise UsageError("summarize needs at least one history")
    bests = tuple(h.best_score for h in histories)
    if strategy is None:
        strategy = histories[0].trials[0].strategy
    return summarize_values(bests, strategy)


def summarize_values(bests: Sequence[float], strategy: str = "") -> RunSummary:
    bests = tuple(float(b) for b in bests)
    if not bests:
        raise UsageError("summarize needs at least one value")
    n = len(bests)
    mean = math.fsum(bests) / n
    std = math.sqrt(math.fsum((b - mean) ** 2 for b in bests) / (n - 1)) if n > 1 else None
    return RunSummary(strategy, bests, mean, std)


# --------------------------------------------------------------------------
# rank-sum test


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties sharing the mean of their positions."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


@lru_cache(maxsize=None)
def u_distribution(n: int, m: int) -> tuple[int, ...]:
    """Counts of arrangements giving each U in ``0..n*m`` under H0 (no ties).

    Uses the recurrence f(n, m, u) = f(n-1, m, u-m) + f(n, m-1, u), splitting on
    whether the largest observation belongs to the first sample.
    """
    if n == 0 or m == 0:
        return (1,)
    with_first = u_distribution(n - 1, m)
    without = u_distribution(n, m - 1)
    out = [0] * (n * m + 1)
    for u, c in enumerate(with_first):
        out[u + m] += c
    for u, c in enumerate(without):
        out[u] += c
    return tuple(out)


def exact_p_value(u: float, n: int, m: int) -> float:
    """Two-sided exact p-value for the U statistic of the first sample."""
    dist = u_distribution(n, m)
    total = math.comb(n + m, n)
    u = int(round(u))
    lower = sum(dist[: u + 1])
    upper = sum(dist[u:])
    return min(1.0, 2.0 * min(lower, upper) / total)


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True)
class RankSumResult:
    u: float
    p_value: float
    reject: bool
    method: str


def rank_sum_test(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> RankSumResult:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) test of independent samples.

    Exact null distribution when ``len(a) + len(b) <= 12`` and there are no
    ties; otherwise the normal approximation with tie-corrected variance and a
    0.5 continuity correction.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    n, m = len(a), len(b)
    if n < 3 or m < 3:
        raise UsageError(f"each sample needs at least 3 values (got {n} and {m})")
    if not 0 < alpha < 1:
        raise UsageError(f"alpha must lie in (0, 1), got {alpha}")
    pooled = a + b
    ranks = midranks(pooled)
    u = sum(ranks[:n]) - n * (n + 1) / 2
    if len(set(pooled)) == 1:
        return RankSumResult(u, 1.0, False, "degenerate")
    ties = len(set(pooled)) < n + m
    if n + m <= EXACT_MAX_TOTAL and not ties:
        p = exact_p_value(u, n, m)
        method = "exact"
    else:
        counts = {}
        for x in pooled:
            counts[x] = counts.get(x, 0) + 1
        tie_term = sum(t**3 - t for t in counts.values())
        N = n + m
        var = n * m / 12.0 * ((N + 1) - tie_term / (N * (N - 1)))
        mean = n * m / 2.0
        dev = max(abs(u - mean) - 0.5, 0.0)
        p = min(1.0, 2.0 * _norm_sf(dev / math.sqrt(var)))
        method = "normal"
    return RankSumResult(u, p, p < alpha, method)


# --------------------------------------------------------------------------
# curves


def mean_curve(histories: Sequence[RunHistory]) -> list[float]:
    """Pointwise mean of best-so-far curves of equal length."""
    return mean_of_curves([h.best_so_far for h in histories])


def mean_of_curves(curves: Sequence[Sequence[float]]) -> list[float]:
    if not curves:
        raise UsageError("need at least one curve")
    length = len(curves[0])
    if any(len(c) != length for c in curves):
        raise UsageError(f"curve lengths differ: {sorted({len(c) for c in curves})}")
    k = len(curves)
    return [math.fsum(c[i] for c in curves) / k for i in range(length)]
