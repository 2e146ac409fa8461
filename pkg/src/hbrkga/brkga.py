"""Biased random-key genetic algorithm with random-walk refinement (HBRKGA).

Each generation:

1. every member is refined by a random walk (which also scores it);
2. members are sorted by score and split into an elite prefix and the rest;
3. the next population is the elite, ``q_m`` fresh random mutants, and
   offspring bred from one random elite and one random non-elite parent by
   biased uniform crossover.

With ``nmov = 0`` the walk reduces to a single evaluation, which gives the
plain BRKGA used as the ablation baseline.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import rng as rngs
from .errors import UsageError
from .hyperspace import HyperSpace
from .objective import Objective, RunHistory
from .random_walk import WalkConfig, WalkResult, random_walk


@dataclass(frozen=True)
class BrkgaConfig:
    """Population and walk parameters. Defaults follow the reference setup."""

    q_ind: int = 6
    q_e: int = 2
    q_m: int = 1
    phi_a: float = 0.7
    nmov: int = 3
    epsilon: float = 0.15
    max_generations: int = 10
    seed: int = 0
    n: int | None = None
    target_score: float | None = None
    time_limit: float | None = None

    def __post_init__(self):
        for name in ("q_ind", "q_e", "q_m", "nmov", "max_generations"):
            v = getattr(self, name)
            if int(v) != v:
                raise UsageError(f"{name} must be an integer, got {v}")
        if self.q_e < 1:
            raise UsageError("q_e must be >= 1")
        if self.q_m < 0:
            raise UsageError("q_m must be >= 0")
        if self.q_e + self.q_m > self.q_ind:
            raise UsageError(f"q_e + q_m = {self.q_e + self.q_m} exceeds q_ind = {self.q_ind}")
        if not self.q_e < self.q_ind - self.q_e:
            raise UsageError(f"elite set ({self.q_e}) must be smaller than the non-elite set ({self.q_ind - self.q_e})")
        if not 0.5 < self.phi_a <= 1.0:
            raise UsageError(f"phi_a must lie in (0.5, 1], got {self.phi_a}")
        if self.nmov < 0:
            raise UsageError("nmov must be >= 0")
        if not self.epsilon >= 0:
            raise UsageError("epsilon must be >= 0")
        if self.max_generations < 0:
            raise UsageError("max_generations must be >= 0")
        if self.n is not None and self.n < 1:
            raise UsageError("n must be >= 1")

    @property
    def walk(self) -> WalkConfig:
        return WalkConfig(self.nmov, self.epsilon)

    @property
    def evaluations_per_generation(self) -> int:
        return self.q_ind * (1 + self.nmov)

    @property
    def budget(self) -> int:
        return self.max_generations * self.evaluations_per_generation

    @classmethod
    def scaled(cls, q_ind: int, **kwargs) -> "BrkgaConfig":
        """Config for population ``q_ind`` keeping the default elite/mutant ratios (1/3, 1/6)."""
        q_e = max(1, round(q_ind / 3))
        while q_e >= q_ind - q_e and q_e > 1:
            q_e -= 1
        q_m = min(max(1, round(q_ind / 6)), q_ind - q_e)
        kwargs.setdefault("q_e", q_e)
        kwargs.setdefault("q_m", q_m)
        return cls(q_ind=q_ind, **kwargs)

    def with_(self, **changes) -> "BrkgaConfig":
        return replace(self, **changes)


@dataclass
class Individual:
    keys: np.ndarray
    score: float | None = None
    gamma: np.ndarray | None = None


Population = list  # list[Individual]


@dataclass
class Generation:
    population: list[Individual]
    best: Individual
    walks: list[WalkResult]


@dataclass
class BrkgaResult:
    gamma_star: np.ndarray
    best_score: float
    history: RunHistory
    generations: int
    best_trace: list[float] = field(default_factory=list)


def _random_individuals(count: int, n: int, rng) -> list[Individual]:
    return [Individual(rng.random(n)) for _ in range(count)]


def init_population(config: BrkgaConfig, rng, n: int | None = None) -> list[Individual]:
    """``q_ind`` individuals with independent Unif(0, 1) keys."""
    n = n if n is not None else config.n
    if n is None or n < 1:
        raise UsageError("number of dimensions must be known and >= 1")
    return _random_individuals(config.q_ind, n, rng)


def make_mutants(q_m: int, n: int, rng) -> list[Individual]:
    if q_m < 0:
        raise UsageError("q_m must be >= 0")
    return _random_individuals(q_m, n, rng)


def partition(pop: list[Individual], q_e: int) -> tuple[list[Individual], list[Individual]]:
    """Stable sort by ascending score; the first ``q_e`` form the elite."""
    if any(ind.score is None for ind in pop):
        raise UsageError("every individual must be scored before partitioning")
    if not 1 <= q_e <= len(pop):
        raise UsageError(f"q_e={q_e} invalid for a population of {len(pop)}")
    ranked = sorted(pop, key=lambda ind: ind.score)
    return ranked[:q_e], ranked[q_e:]


def crossover(a: Individual, b: Individual, phi_a: float, rng) -> Individual:
    """Biased uniform crossover: each gene comes from ``a`` with probability ``phi_a``."""
    ka, kb = np.asarray(a.keys), np.asarray(b.keys)
    if ka.shape != kb.shape:
        raise UsageError(f"parents differ in length: {ka.shape} vs {kb.shape}")
    from_a = rng.random(ka.shape[0]) < phi_a
    return Individual(np.where(from_a, ka, kb))


def refine_population(
    pop: list[Individual],
    config: BrkgaConfig,
    space: HyperSpace,
    objective: Objective,
    generation: int,
    *,
    refine: Callable = random_walk,
    executor=None,
    strategy: str = "hbrkga",
    first_trial: int = 0,
) -> list[WalkResult]:
    """Run the walk on every member, possibly concurrently; results in member order."""
    walk = config.walk
    per = 1 + walk.nmov

    def one(i):
        return refine(
            pop[i].keys,
            walk,
            objective,
            space,
            rngs.stream(config.seed, rngs.WALK, generation, i),
            strategy=strategy,
            first_trial=first_trial + i * per,
        )

    indices = range(len(pop))
    results = list(executor.map(one, indices)) if executor is not None else [one(i) for i in indices]
    for ind, res in zip(pop, results):
        ind.keys, ind.score, ind.gamma = res.keys, res.score, res.gamma
    return results


def next_population(scored: list[Individual], config: BrkgaConfig, generation: int) -> list[Individual]:
    """Elite, mutants and offspring from an already scored population."""
    n = len(scored[0].keys)
    elite, non_elite = partition(scored, config.q_e)
    mutants = make_mutants(config.q_m, n, rngs.stream(config.seed, rngs.MUTANTS, generation))
    breed = rngs.stream(config.seed, rngs.CROSSOVER, generation)
    offspring = []
    for _ in range(config.q_ind - config.q_e - config.q_m):
        a = elite[int(breed.integers(len(elite)))]
        b = non_elite[int(breed.integers(len(non_elite)))]
        offspring.append(crossover(a, b, config.phi_a, breed))
    carried = [Individual(e.keys.copy(), e.score, None if e.gamma is None else e.gamma.copy()) for e in elite]
    return carried + mutants + offspring


def step_generation(
    pop: list[Individual],
    config: BrkgaConfig,
    space: HyperSpace,
    objective: Objective,
    generation: int = 0,
    **kwargs,
) -> Generation:
    """Refine, partition and breed one generation.

    Returns the next population and the best refined member of this one.
    """
    walks = refine_population(pop, config, space, objective, generation, **kwargs)
    best = min(pop, key=lambda ind: ind.score)
    best = Individual(best.keys.copy(), best.score, best.gamma.copy())
    return Generation(next_population(pop, config, generation), best, walks)


def run(
    config: BrkgaConfig,
    objective: Objective,
    space: HyperSpace,
    *,
    executor=None,
    strategy: str = "hbrkga",
    refine: Callable = random_walk,
) -> BrkgaResult:
    """Evolve for ``config.max_generations`` generations and return the best point found."""
    if config.n is not None and config.n != space.n:
        raise UsageError(f"config is for {config.n} dims, space has {space.n}")
    if objective.n_dims != space.n:
        raise UsageError(f"objective takes {objective.n_dims} dims, space has {space.n}")
    if config.max_generations < 1:
        raise UsageError("max_generations must be >= 1; nothing was evaluated")

    history = RunHistory()
    pop = init_population(config, rngs.stream(config.seed, rngs.INIT), space.n)
    star: Individual | None = None
    trace = []
    started = time.perf_counter()
    generations = 0
    for g in range(config.max_generations):
        gen = step_generation(
            pop, config, space, objective, g,
            refine=refine, executor=executor, strategy=strategy, first_trial=len(history),
        )
        for walk in gen.walks:
            for ev in walk.evaluations:
                history.add(strategy, ev.gamma, ev.score, ev.wall_time)
        generations += 1
        if star is None or gen.best.score < star.score:
            star = gen.best
        trace.append(star.score)
        pop = gen.population
        if config.target_score is not None and star.score <= config.target_score:
            break
        if config.time_limit is not None and time.perf_counter() - started >= config.time_limit:
            break
    assert star is not None and math.isfinite(star.score)
    return BrkgaResult(star.gamma, star.score, history, generations, trace)
