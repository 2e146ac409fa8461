"""Exception hierarchy shared across the package."""


class HbrkgaError(Exception):
    """Base class for all package errors."""


class UsageError(HbrkgaError, ValueError):
    """A function was called with arguments that violate its contract."""


class DomainError(HbrkgaError, ValueError):
    """A numeric value lies outside the domain an operation accepts."""


class EvaluationError(HbrkgaError, RuntimeError):
    """An objective evaluation failed.

    Carries enough context (strategy, trial index, hyperparameters) to
    locate the failing trial in a run log.
    """

    def __init__(self, message, *, strategy=None, trial_index=None, gamma=None):
        super().__init__(message)
        self.strategy = strategy
        self.trial_index = trial_index
        self.gamma = None if gamma is None else tuple(float(v) for v in gamma)

    def __str__(self):
        parts = [super().__str__()]
        if self.strategy is not None:
            parts.append(f"strategy={self.strategy}")
        if self.trial_index is not None:
            parts.append(f"trial={self.trial_index}")
        if self.gamma is not None:
            parts.append(f"gamma={list(self.gamma)}")
        return " | ".join(parts)


class TrainingError(HbrkgaError, RuntimeError):
    """Neural network training diverged (non-finite loss)."""

    def __init__(self, message, epoch):
        super().__init__(f"{message} (epoch {epoch})")
        self.epoch = epoch


class BudgetExceeded(HbrkgaError, RuntimeError):
    """More objective evaluations were requested than the budget allows."""


class ConfigError(HbrkgaError, ValueError):
    """An experiment or space definition file is malformed."""

    def __init__(self, message, *, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line
