"""Experiment orchestration: budget plans, run dispatch and report files.

Every ``(strategy, run)`` pair is an independent job with its own seed,
derived from the master seed and the strategy name so that adding or
removing a strategy leaves the others untouched. Jobs go to a process pool;
results are collected in job order, so output files do not depend on the
worker count or on completion order.
"""

from __future__ import annotations

import itertools
import logging
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import rng as rngs
from .baselines import GridPlan, grid_search, random_search
from .brkga import BrkgaConfig
from .brkga import run as run_brkga
from .config import ExperimentConfig, default_workers
from .errors import BudgetExceeded, EvaluationError, UsageError
from .logs import write_csv, write_trials_csv, write_trials_jsonl
from .objective import CountingObjective, Objective, RunHistory, synthetic_objective
from .stats import mean_curve, rank_sum_test, summarize

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EVALUATION = 2


@dataclass(frozen=True)
class BudgetPlan:
    strategy: str
    evaluations: int
    generations: int | None = None
    brkga: BrkgaConfig | None = None
    grid: GridPlan | None = None


def strategy_budget_map(strategy: str, budget: int, brkga_config: BrkgaConfig | None = None,
                        grid: GridPlan | None = None) -> BudgetPlan:
    """Translate an evaluation budget into a concrete plan for one strategy."""
    if budget < 1:
        raise UsageError("budget must be >= 1")
    if strategy == "random":
        return BudgetPlan(strategy, budget)
    if strategy == "grid":
        if grid is None:
            raise UsageError("grid strategy needs grid values for every dimension")
        if grid.size > budget:
            raise UsageError(f"grid has {grid.size} combinations, exceeding the budget of {budget}")
        return BudgetPlan(strategy, grid.size, grid=grid)
    if strategy in ("brkga", "hbrkga"):
        cfg = brkga_config or BrkgaConfig()
        if strategy == "brkga":
            cfg = cfg.with_(nmov=0)
        per_gen = cfg.evaluations_per_generation
        generations, remainder = divmod(budget, per_gen)
        if remainder:
            raise UsageError(
                f"{strategy}: budget {budget} is not a multiple of q_ind*(1+nmov) = {per_gen} "
                f"(remainder {remainder})"
            )
        return BudgetPlan(strategy, budget, generations, cfg.with_(max_generations=generations))
    raise UsageError(f"unknown strategy {strategy!r}")


def plans_for(config: ExperimentConfig) -> dict[str, BudgetPlan]:
    plans = {}
    for s in config.strategies:
        grid = None
        if s == "grid":
            grid = GridPlan.from_space(config.space)
        plans[s] = strategy_budget_map(s, config.budget, config.brkga_config(s), grid)
    return plans


def run_seed(master_seed: int, strategy: str, run: int) -> int:
    return rngs.derive_seed(master_seed, strategy, run)


def build_objective(config: ExperimentConfig, seed: int) -> Objective:
    if config.objective == "mlp":
        from .learner import ann_objective, load_dataset, make_blobs

        m = config.mlp
        data = load_dataset(m.data) if m.data else make_blobs(m.classes, m.per_class, m.spread, m.data_seed, m.n_features)
        return ann_objective(data, config.space, seed, max_epochs=m.max_epochs, patience=m.patience)
    return synthetic_objective(config.objective, config.space.n)


@dataclass
class JobResult:
    strategy: str
    run: int
    history: RunHistory | None
    calls: int
    error: EvaluationError | None = None


def execute(plan: BudgetPlan, objective: Objective, space, seed: int) -> RunHistory:
    """Run a single strategy once under its plan."""
    if plan.strategy == "random":
        return random_search(space, plan.evaluations, objective, rngs.stream(seed, rngs.SAMPLE))
    if plan.strategy == "grid":
        return grid_search(plan.grid, objective)
    cfg = plan.brkga.with_(seed=seed)
    return run_brkga(cfg, objective, space, strategy=plan.strategy).history


def run_job(config: ExperimentConfig, plan: BudgetPlan, run: int) -> JobResult:
    seed = run_seed(config.seed, plan.strategy, run)
    objective = CountingObjective(build_objective(config, seed), budget=config.budget)
    try:
        history = execute(plan, objective, config.space, seed)
    except EvaluationError as exc:
        exc.strategy = exc.strategy or plan.strategy
        return JobResult(plan.strategy, run, None, objective.calls, exc)
    except BudgetExceeded as exc:
        # a plan that overspends is a bug, not a trial failure
        raise AssertionError(f"{plan.strategy} run {run}: {exc}") from exc
    return JobResult(plan.strategy, run, history, objective.calls)


def _run_job_args(args):
    return run_job(*args)


def run_all(config: ExperimentConfig, plans: dict[str, BudgetPlan], workers: int) -> list[JobResult]:
    jobs = [(config, plans[s], r) for s, r in itertools.product(config.strategies, range(config.runs))]
    if workers <= 1 or len(jobs) == 1:
        return [run_job(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job_args, jobs))


def write_reports(config: ExperimentConfig, results: list[JobResult]) -> None:
    out = Path(config.output)
    trials_dir = out / "trials"
    if trials_dir.exists():
        shutil.rmtree(trials_dir)
    for stale in ("summary.csv", "comparisons.csv", "curves.csv", "failures.csv"):
        (out / stale).unlink(missing_ok=True)
    n = config.space.n

    by_strategy: dict[str, list[RunHistory]] = {s: [] for s in config.strategies}
    failures = []
    for res in results:
        if res.error is not None:
            failures.append([res.strategy, res.run, "" if res.error.trial_index is None else res.error.trial_index,
                             str(res.error)])
            continue
        d = trials_dir / res.strategy
        d.mkdir(parents=True, exist_ok=True)
        write_trials_csv(d / f"run_{res.run:03d}.csv", res.history, res.run, n, config.record_wall_time)
        write_trials_jsonl(d / f"run_{res.run:03d}.jsonl", res.history, res.run, config.record_wall_time)
        by_strategy[res.strategy].append(res.history)

    summary_rows = []
    for s, hists in by_strategy.items():
        if not hists:
            continue
        summ = summarize(hists, s)
        summary_rows.append([s, len(hists), summ.mean, "" if summ.std is None else summ.std,
                             min(summ.bests), max(summ.bests)])
    write_csv(out / "summary.csv", ["strategy", "runs", "mean_best", "std_best", "min_best", "max_best"], summary_rows)

    comparison_rows = []
    for a, b in itertools.combinations(config.strategies, 2):
        xa = [h.best_score for h in by_strategy[a]]
        xb = [h.best_score for h in by_strategy[b]]
        if len(xa) < 3 or len(xb) < 3:
            log.warning("skipping %s vs %s: rank-sum test needs >= 3 runs per strategy", a, b)
            continue
        res = rank_sum_test(xa, xb, config.alpha)
        comparison_rows.append([a, b, res.u, res.p_value, str(res.reject).lower(), res.method])
    write_csv(out / "comparisons.csv", ["strategy_a", "strategy_b", "u", "p_value", "reject", "method"],
              comparison_rows)

    curve_rows = []
    for s, hists in by_strategy.items():
        if not hists:
            continue
        for i, v in enumerate(mean_curve(hists)):
            curve_rows.append([s, i, v])
    write_csv(out / "curves.csv", ["strategy", "trial_index", "mean_best_so_far"], curve_rows)

    if failures:
        write_csv(out / "failures.csv", ["strategy", "run", "trial_index", "error"], failures)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> int:
    """Execute every strategy and run, write all reports, and return an exit status."""
    plans = plans_for(config)
    workers = workers if workers is not None else (config.workers or default_workers())
    results = run_all(config, plans, workers)
    for res in results:
        assert res.calls <= config.budget, f"{res.strategy} run {res.run} used {res.calls} evaluations"
        if res.error is not None:
            log.error("%s run %d failed: %s", res.strategy, res.run, res.error)
    Path(config.output).mkdir(parents=True, exist_ok=True)
    write_reports(config, results)
    return EXIT_EVALUATION if any(r.error is not None for r in results) else EXIT_OK
