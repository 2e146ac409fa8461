"""Hyperparameter optimisation with a biased random-key genetic algorithm
hybridised with random-walk refinement, plus grid/random search baselines."""

from .baselines import GridPlan, grid_search, random_search
from .brkga import BrkgaConfig, BrkgaResult, Individual, run
from .errors import (
    BudgetExceeded,
    ConfigError,
    DomainError,
    EvaluationError,
    HbrkgaError,
    TrainingError,
    UsageError,
)
from .hyperspace import DimensionSpec, HyperSpace
from .objective import (
    ConfusionCounts,
    CountingObjective,
    FunctionObjective,
    Objective,
    RunHistory,
    TrialRecord,
    macro_f1,
    synthetic_objective,
    wrap_maximize,
)
from .random_walk import WalkConfig, random_walk
from .stats import mean_curve, rank_sum_test, summarize

__version__ = "0.1.0"
