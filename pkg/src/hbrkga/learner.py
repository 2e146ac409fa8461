"""Small feed-forward classifier used as a tunable objective.

Three ReLU hidden layers, a softmax output, mean cross-entropy plus an L2
penalty on the weights, full-batch ADAM, and early stopping on validation
loss. Everything is plain numpy in float64 so that training is exactly
reproducible from a seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rngs
from .errors import TrainingError, UsageError
from .hyperspace import DimensionSpec, HyperSpace
from .objective import ConfusionCounts, Objective, macro_f1, wrap_maximize

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class MlpConfig:
    hidden_sizes: tuple[int, int, int]
    learning_rate: float
    reg: float = 0.0
    max_epochs: int = 300
    patience: int = 13
    min_delta: float = 1e-8

    def __post_init__(self):
        sizes = tuple(int(h) for h in self.hidden_sizes)
        if len(sizes) != 3 or any(h < 1 for h in sizes):
            raise UsageError(f"need three hidden sizes >= 1, got {self.hidden_sizes}")
        object.__setattr__(self, "hidden_sizes", sizes)
        if not self.learning_rate > 0:
            raise UsageError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not self.reg >= 0:
            raise UsageError(f"reg must be >= 0, got {self.reg}")
        if self.max_epochs < 1 or self.patience < 1:
            raise UsageError("max_epochs and patience must be >= 1")

    @classmethod
    def from_gamma(cls, gamma, **kwargs) -> "MlpConfig":
        n1, n2, n3, lr, reg = (float(v) for v in gamma)
        return cls((round(n1), round(n2), round(n3)), lr, reg, **kwargs)


@dataclass(frozen=True)
class Dataset:
    x_train: np.ndarray
    y_train: np.ndarray
    x_val: np.ndarray
    y_val: np.ndarray
    n_classes: int

    def __post_init__(self):
        if self.x_train.ndim != 2 or self.x_val.ndim != 2 or self.x_train.shape[1] != self.x_val.shape[1]:
            raise UsageError("train and validation features must be 2-D with equal width")
        if len(self.x_train) != len(self.y_train) or len(self.x_val) != len(self.y_val):
            raise UsageError("feature and label counts differ")
        for y in (self.y_train, self.y_val):
            if y.size and (y.min() < 0 or y.max() >= self.n_classes):
                raise UsageError(f"labels must lie in [0, {self.n_classes})")

    @property
    def n_features(self) -> int:
        return self.x_train.shape[1]


# --------------------------------------------------------------------------
# network


def init_params(n_in: int, hidden_sizes, n_out: int, rng) -> list[np.ndarray]:
    """He-style uniform weights, zero biases. Returned as ``[W1, b1, W2, b2, ...]``."""
    sizes = [n_in, *hidden_sizes, n_out]
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / fan_in)
        params.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def _check_shapes(params, x):
    if len(params) % 2 or not params:
        raise UsageError("params must alternate weight matrices and bias vectors")
    width = x.shape[1] if x.ndim == 2 else -1
    for W, b in zip(params[::2], params[1::2]):
        if W.ndim != 2 or W.shape[0] != width or b.shape != (W.shape[1],):
            raise UsageError(f"layer shape mismatch: input width {width}, weight {W.shape}, bias {b.shape}")
        width = W.shape[1]


def _log_softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def _forward(params, x):
    acts, pres = [x], []
    a = x
    n_layers = len(params) // 2
    for k in range(n_layers):
        z = a @ params[2 * k] + params[2 * k + 1]
        pres.append(z)
        a = np.maximum(z, 0.0) if k < n_layers - 1 else z
        acts.append(a)
    return acts, pres


def forward(params, features) -> np.ndarray:
    """Class probabilities, one row per input."""
    x = np.asarray(features, dtype=float)
    _check_shapes(params, x)
    acts, _ = _forward(params, x)
    return np.exp(_log_softmax(acts[-1]))


def cross_entropy(params, x, y) -> float:
    acts, _ = _forward(params, x)
    logp = _log_softmax(acts[-1])
    return float(-logp[np.arange(len(y)), y].mean())


def loss_and_grads(params, x, y, reg: float = 0.0) -> tuple[float, list[np.ndarray]]:
    """Mean cross-entropy plus ``reg * sum(W**2)`` and its gradient by backprop."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int)
    _check_shapes(params, x)
    acts, pres = _forward(params, x)
    logp = _log_softmax(acts[-1])
    n = len(y)
    loss = -logp[np.arange(n), y].mean()
    weights = params[::2]
    loss += reg * sum(float(np.sum(W * W)) for W in weights)

    delta = np.exp(logp)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grads = [None] * len(params)
    for k in reversed(range(len(params) // 2)):
        W = params[2 * k]
        grads[2 * k] = acts[k].T @ delta + 2.0 * reg * W
        grads[2 * k + 1] = delta.sum(axis=0)
        if k:
            delta = (delta @ W.T) * (pres[k - 1] > 0)
    return float(loss), grads


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(state: AdamState, params, grads, learning_rate: float) -> list[np.ndarray]:
    """One bias-corrected ADAM update. ``state`` is advanced in place."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise UsageError("params, grads and state differ in length")
    state.t += 1
    c1 = 1.0 - ADAM_BETA1**state.t
    c2 = 1.0 - ADAM_BETA2**state.t
    out = []
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = ADAM_BETA1 * state.m[i] + (1.0 - ADAM_BETA1) * g
        state.v[i] = ADAM_BETA2 * state.v[i] + (1.0 - ADAM_BETA2) * g * g
        m_hat = state.m[i] / c1
        v_hat = state.v[i] / c2
        out.append(p - learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS))
    return out


# --------------------------------------------------------------------------
# training


@dataclass
class TrainResult:
    params: list[np.ndarray]
    counts: ConfusionCounts
    val_losses: list[float] = field(default_factory=list)
    best_epoch: int = 0  # 1-based

    @property
    def epochs(self) -> int:
        return len(self.val_losses)

    @property
    def macro_f1(self) -> float:
        return macro_f1(self.counts)


class EarlyStopping:
    """Counts consecutive epochs without a strict improvement of at least ``min_delta``."""

    def __init__(self, patience: int, min_delta: float = 1e-8):
        self.patience = patience
        self.min_delta = min_delta
        self.best = math.inf
        self.best_epoch = 0
        self.bad_epochs = 0

    def update(self, epoch: int, loss: float) -> bool:
        """Register an epoch's loss. Returns True if it is the new best."""
        if loss < self.best - self.min_delta:
            self.best, self.best_epoch, self.bad_epochs = loss, epoch, 0
            return True
        self.bad_epochs += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.bad_epochs >= self.patience


def train(config: MlpConfig, data: Dataset, rng, *, val_loss_fn=None) -> TrainResult:
    """Full-batch ADAM with early stopping; returns the best-validation-loss parameters.

    ``val_loss_fn(params, epoch)`` overrides the validation loss (for tests).
    """
    params = init_params(data.n_features, config.hidden_sizes, data.n_classes, rng)
    state = AdamState.zeros_like(params)
    stopper = EarlyStopping(config.patience, config.min_delta)
    best_params = [p.copy() for p in params]
    val_losses = []
    for epoch in range(1, config.max_epochs + 1):
        loss, grads = loss_and_grads(params, data.x_train, data.y_train, config.reg)
        if not math.isfinite(loss):
            raise TrainingError("non-finite training loss", epoch)
        params = adam_step(state, params, grads, config.learning_rate)
        if val_loss_fn is not None:
            val = float(val_loss_fn(params, epoch))
        else:
            val = cross_entropy(params, data.x_val, data.y_val)
        if not math.isfinite(val):
            raise TrainingError("non-finite validation loss", epoch)
        val_losses.append(val)
        if stopper.update(epoch, val):
            best_params = [p.copy() for p in params]
        if stopper.should_stop:
            break
    pred = forward(best_params, data.x_val).argmax(axis=1)
    counts = ConfusionCounts.from_labels(data.y_val, pred, data.n_classes)
    return TrainResult(best_params, counts, val_losses, stopper.best_epoch)


# --------------------------------------------------------------------------
# data


def make_blobs(classes: int, per_class: int, spread: float, seed: int, n_features: int = 2) -> Dataset:
    """Gaussian clusters around evenly spaced points on the unit circle.

    Split 80/20 per class into train and validation.
    """
    if classes < 1 or per_class < 1:
        raise UsageError("classes and per_class must be >= 1")
    if n_features < 2:
        raise UsageError("n_features must be >= 2")
    if spread < 0:
        raise UsageError("spread must be >= 0")
    rng = np.random.default_rng(seed)
    n_train = round(0.8 * per_class)
    xs_tr, ys_tr, xs_va, ys_va = [], [], [], []
    for c in range(classes):
        mean = np.zeros(n_features)
        angle = 2.0 * math.pi * c / classes
        mean[0], mean[1] = math.cos(angle), math.sin(angle)
        pts = mean + spread * rng.standard_normal((per_class, n_features))
        pts = pts[rng.permutation(per_class)]
        xs_tr.append(pts[:n_train])
        xs_va.append(pts[n_train:])
        ys_tr.append(np.full(n_train, c))
        ys_va.append(np.full(per_class - n_train, c))
    x_tr, y_tr = np.concatenate(xs_tr), np.concatenate(ys_tr)
    x_va, y_va = np.concatenate(xs_va), np.concatenate(ys_va)
    p_tr, p_va = rng.permutation(len(y_tr)), rng.permutation(len(y_va))
    return Dataset(x_tr[p_tr], y_tr[p_tr], x_va[p_va], y_va[p_va], classes)


def save_dataset(data: Dataset, path) -> None:
    """Write ``split,label,f0..`` rows; floats use ``repr`` so loading is exact."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["split", "label", *(f"f{j}" for j in range(data.n_features))])
        for split, xs, ys in (("train", data.x_train, data.y_train), ("val", data.x_val, data.y_val)):
            for x, y in zip(xs, ys):
                w.writerow([split, int(y), *(repr(float(v)) for v in x)])


def load_dataset(path, n_classes: int | None = None) -> Dataset:
    rows = {"train": ([], []), "val": ([], [])}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            xs, ys = rows[row[0]]
            ys.append(int(row[1]))
            xs.append([float(v) for v in row[2:]])
    labels = rows["train"][1] + rows["val"][1]
    k = n_classes if n_classes is not None else max(labels) + 1
    return Dataset(
        np.array(rows["train"][0], dtype=float), np.array(rows["train"][1], dtype=int),
        np.array(rows["val"][0], dtype=float), np.array(rows["val"][1], dtype=int), k,
    )


# --------------------------------------------------------------------------
# objective


RANGE_PRESETS = {
    "cosmos": [(5, 15), (5, 30), (5, 45)],
    "mnist": [(1000, 2000), (2000, 4000), (2000, 6000)],
}
GRID_COUNTS = (2, 3, 4, 5, 2)


def _even_grid(lo, hi, k, integer):
    vals = np.linspace(lo, hi, k)
    return tuple(float(round(v)) if integer else float(v) for v in vals)


def mlp_space(ranges: str = "cosmos") -> HyperSpace:
    """Five-dimensional space: three layer widths, learning rate, L2 coefficient.

    Grid values are spread evenly across each range with 2, 3, 4, 5 and 2 points.
    """
    try:
        layers = RANGE_PRESETS[ranges]
    except KeyError:
        raise UsageError(f"unknown range preset {ranges!r}; choose from {sorted(RANGE_PRESETS)}") from None
    bounds = [*layers, (1e-6, 1e-1), (0.0, 1e-3)]
    names = ["neurons_1", "neurons_2", "neurons_3", "learning_rate", "reg"]
    kinds = ["int", "int", "int", "float", "float"]
    return HyperSpace(
        DimensionSpec(nm, kd, lo, hi, _even_grid(lo, hi, k, kd == "int"))
        for nm, kd, (lo, hi), k in zip(names, kinds, bounds, GRID_COUNTS)
    )


class MlpObjective(Objective):
    """Negated validation macro-F1 of an MLP trained with hyperparameters gamma.

    The weight-init seed is derived from ``seed`` and the exact gamma values,
    so the same point always gets the same score.
    """

    def __init__(self, data: Dataset, seed: int = 0, max_epochs: int = 300, patience: int = 13):
        super().__init__(5, "mlp")
        self.data = data
        self.seed = seed
        self.max_epochs = max_epochs
        self.patience = patience

    def train(self, gamma) -> TrainResult:
        config = MlpConfig.from_gamma(gamma, max_epochs=self.max_epochs, patience=self.patience)
        init_seed = rngs.derive_seed(self.seed, *(repr(float(v)) for v in gamma))
        return train(config, self.data, np.random.default_rng(init_seed))

    def evaluate(self, gamma):
        return wrap_maximize(self.train(gamma).macro_f1)


def ann_objective(data: Dataset, space: HyperSpace | None = None, seed: int = 0, **kwargs) -> MlpObjective:
    if space is not None and space.n != 5:
        raise UsageError(f"the MLP objective needs a 5-dim space, got {space.n}")
    return MlpObjective(data, seed, **kwargs)
