"""Grid search and random search baselines."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UsageError
from .hyperspace import HyperSpace
from .objective import Objective, RunHistory, timed_eval


@dataclass(frozen=True)
class GridPlan:
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        vals = tuple(tuple(float(v) for v in dim) for dim in self.values)
        if not vals:
            raise UsageError("grid plan needs at least one dimension")
        for i, dim in enumerate(vals):
            if not dim:
                raise UsageError(f"grid dimension {i} has no values")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_space(cls, space: HyperSpace) -> "GridPlan":
        missing = [d.name for d in space.dims if not d.grid_values]
        if missing:
            raise UsageError(f"dimensions without grid values: {missing}")
        return cls(tuple(d.grid_values for d in space.dims))

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.values)

    @property
    def size(self) -> int:
        return math.prod(self.counts)

    def points(self):
        """Every combination, lexicographic with the last dimension varying fastest."""
        return itertools.product(*self.values)


def _evaluate_all(points: Sequence, objective: Objective, strategy: str, executor) -> RunHistory:
    def one(item):
        idx, gamma = item
        return timed_eval(objective, gamma, strategy=strategy, trial_index=idx)

    items = list(enumerate(points))
    results = executor.map(one, items) if executor is not None else map(one, items)
    history = RunHistory()
    for (_, gamma), (score, dt) in zip(items, results):
        history.add(strategy, gamma, score, dt)
    return history


def grid_search(plan: GridPlan, objective: Objective, *, executor=None, strategy: str = "grid") -> RunHistory:
    if objective.n_dims != len(plan.values):
        raise UsageError(f"plan has {len(plan.values)} dims, objective takes {objective.n_dims}")
    return _evaluate_all([np.array(p) for p in plan.points()], objective, strategy, executor)


def sample_uniform(space: HyperSpace, count: int, rng) -> np.ndarray:
    """``count`` raw draws, each coordinate Unif(min_i, max_i), before snapping."""
    return rng.uniform(space.lows, space.highs, size=(count, space.n))


def random_search(
    space: HyperSpace, budget: int, objective: Objective, rng, *, executor=None, strategy: str = "random"
) -> RunHistory:
    """Evaluate ``budget`` independent uniform samples snapped to the space."""
    if int(budget) != budget or budget < 1:
        raise UsageError(f"budget must be a positive integer, got {budget}")
    if objective.n_dims != space.n:
        raise UsageError(f"space has {space.n} dims, objective takes {objective.n_dims}")
    raw = sample_uniform(space, int(budget), rng)
    return _evaluate_all([space.snap(row) for row in raw], objective, strategy, executor)
