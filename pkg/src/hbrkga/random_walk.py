"""Random-walk refinement of a single candidate.

The walk decodes a key vector, evaluates it, then takes ``nmov`` single-
coordinate steps. Each step perturbs one uniformly chosen coordinate by a
random signed amount whose magnitude scales with the coordinate's current
value. The chain always continues from the latest step; the incumbent is the
best point seen, and it is re-encoded to keys on exit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, UsageError
from .hyperspace import HyperSpace
from .objective import Objective, timed_eval

# Fraction of a dimension's span used as the minimum step width, so that a
# coordinate sitting at 0 can still move.
MIN_WIDTH_FRACTION = 0.01


@dataclass(frozen=True)
class WalkConfig:
    nmov: int = 3
    epsilon: float = 0.15

    def __post_init__(self):
        if int(self.nmov) != self.nmov or self.nmov < 0:
            raise UsageError(f"nmov must be a non-negative integer, got {self.nmov}")
        if not self.epsilon >= 0:
            raise UsageError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class Evaluation:
    gamma: tuple[float, ...]
    score: float
    wall_time: float


@dataclass
class WalkResult:
    keys: np.ndarray
    gamma: np.ndarray
    score: float
    evaluations: list[Evaluation] = field(default_factory=list)


def step_width(value: float, span: float, epsilon: float) -> float:
    return max(abs(value) * (1.0 + epsilon), MIN_WIDTH_FRACTION * span)


def apply_move(gamma: np.ndarray, space: HyperSpace, i: int, step: float) -> np.ndarray:
    """Return a copy of ``gamma`` with coordinate ``i`` shifted by ``step`` and snapped."""
    out = np.array(gamma, dtype=float)
    out[i] = space.round_to(i, out[i] + step)
    return out


def movement(gamma, space: HyperSpace, epsilon: float, rng) -> np.ndarray:
    """Perturb one uniformly chosen coordinate of ``gamma``."""
    i = int(rng.integers(space.n))
    flip = rng.random() < 0.5  # Bernoulli(0.5)
    sign = 1.0 - 2.0 * flip
    lo, hi = space.dim_bounds(i)
    u = rng.uniform(0.0, step_width(gamma[i], hi - lo, epsilon))
    return apply_move(gamma, space, i, sign * u)


def random_walk(
    keys,
    walk: WalkConfig,
    objective: Objective,
    space: HyperSpace,
    rng,
    *,
    strategy: str | None = None,
    first_trial: int | None = None,
) -> WalkResult:
    """Refine ``keys`` with ``1 + walk.nmov`` evaluations.

    ``strategy`` and ``first_trial`` only label errors.
    """
    evaluations: list[Evaluation] = []

    def evaluate(g):
        idx = None if first_trial is None else first_trial + len(evaluations)
        try:
            s, dt = timed_eval(objective, g, strategy=strategy, trial_index=idx)
        except EvaluationError as exc:
            if exc.trial_index is None:
                exc.trial_index = idx
            raise
        evaluations.append(Evaluation(tuple(float(v) for v in g), s, dt))
        return s

    gamma = space.decode(keys)
    score = evaluate(gamma)
    current = gamma
    for _ in range(walk.nmov):
        current = movement(current, space, walk.epsilon, rng)
        candidate = evaluate(current)
        if candidate < score:
            gamma, score = current, candidate
    return WalkResult(space.encode(gamma), gamma, score, evaluations)
