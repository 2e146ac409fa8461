"""Typed, bounded hyperparameter spaces and the key <-> value mapping.

A :class:`HyperSpace` is an ordered list of :class:`DimensionSpec`. Candidate
solutions live in two domains:

* the key domain, ``[0, 1]^n``, where the genetic operators work;
* the hyperparameter domain, where each value respects its dimension's
  bounds and data type.

``encode`` is plain min-max normalisation. ``decode`` is its inverse followed
by :meth:`HyperSpace.round_to`, which snaps to the dimension's type and bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, UsageError

INTEGER = "integer"
REAL = "real"
_KIND_ALIASES = {
    "int": INTEGER,
    "integer": INTEGER,
    "float": REAL,
    "real": REAL,
}


def round_half_away(v: float) -> float:
    """Round to the nearest whole number, ties away from zero."""
    return math.copysign(math.floor(abs(v) + 0.5), v) + 0.0


@dataclass(frozen=True)
class DimensionSpec:
    """One hyperparameter: its name, data type and closed range.

    ``grid_values`` is only consulted by grid search.
    """

    name: str
    kind: str
    min: float
    max: float
    grid_values: tuple[float, ...] | None = None

    def __post_init__(self):
        kind = _KIND_ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise UsageError(f"dimension {self.name!r}: unknown kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        lo, hi = float(self.min), float(self.max)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise UsageError(f"dimension {self.name!r}: bounds must be finite")
        if not lo < hi:
            raise UsageError(f"dimension {self.name!r}: min must be < max (got {lo}, {hi})")
        if kind == INTEGER and (lo != math.floor(lo) or hi != math.floor(hi)):
            raise UsageError(f"dimension {self.name!r}: integer bounds must be whole numbers")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)
        if self.grid_values is not None:
            grid = tuple(float(v) for v in self.grid_values)
            for v in grid:
                if not lo <= v <= hi:
                    raise UsageError(f"dimension {self.name!r}: grid value {v} outside [{lo}, {hi}]")
                if kind == INTEGER and v != math.floor(v):
                    raise UsageError(f"dimension {self.name!r}: grid value {v} is not an integer")
            object.__setattr__(self, "grid_values", grid)

    @property
    def is_integer(self) -> bool:
        return self.kind == INTEGER

    @property
    def span(self) -> float:
        return self.max - self.min

    def round_to(self, v: float) -> float:
        v = float(v)
        if not math.isfinite(v):
            raise DomainError(f"dimension {self.name!r}: cannot round non-finite value {v}")
        v = min(max(v, self.min), self.max)
        if self.is_integer:
            v = round_half_away(v)
        return min(max(v, self.min), self.max)


@dataclass(frozen=True)
class HyperSpace:
    """Immutable ordered collection of dimensions."""

    dims: tuple[DimensionSpec, ...] = field()

    def __init__(self, dims: Iterable[DimensionSpec]):
        dims = tuple(dims)
        if not dims:
            raise UsageError("a space needs at least one dimension")
        names = [d.name for d in dims]
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate dimension names in {names}")
        object.__setattr__(self, "dims", dims)

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> list[str]:
        return [d.name for d in self.dims]

    @property
    def lows(self) -> np.ndarray:
        return np.array([d.min for d in self.dims])

    @property
    def highs(self) -> np.ndarray:
        return np.array([d.max for d in self.dims])

    def _dim(self, i: int) -> DimensionSpec:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < len(self.dims):
            raise UsageError(f"dimension index {i} out of range for a {self.n}-dim space")
        return self.dims[i]

    def dim_bounds(self, i: int) -> tuple[float, float]:
        d = self._dim(i)
        return d.min, d.max

    def round_to(self, i: int, v: float) -> float:
        """Closest value to ``v`` that has dimension ``i``'s type and range."""
        return self._dim(i).round_to(v)

    def snap(self, values: Sequence[float]) -> np.ndarray:
        """Apply :meth:`round_to` component-wise."""
        values = self._check_len(values, "value")
        return np.array([d.round_to(v) for d, v in zip(self.dims, values)])

    def decode(self, keys: Sequence[float]) -> np.ndarray:
        """Map a key vector in ``[0, 1]^n`` to a conforming hyperparameter vector."""
        keys = self._check_len(keys, "key")
        if not np.all(np.isfinite(keys)) or np.any(keys < 0.0) or np.any(keys > 1.0):
            raise DomainError(f"keys must lie in [0, 1], got {keys.tolist()}")
        return np.array([d.round_to(d.min + k * d.span) for d, k in zip(self.dims, keys)])

    def encode(self, gamma: Sequence[float]) -> np.ndarray:
        """Min-max normalise a hyperparameter vector into the key domain."""
        gamma = self._check_len(gamma, "value")
        out = np.empty(self.n)
        for i, (d, v) in enumerate(zip(self.dims, gamma)):
            if not (math.isfinite(v) and d.min <= v <= d.max):
                raise DomainError(f"dimension {d.name!r}: value {v} outside [{d.min}, {d.max}]")
            out[i] = (v - d.min) / d.span
        return np.clip(out, 0.0, 1.0)

    def contains(self, gamma: Sequence[float]) -> bool:
        """True when ``gamma`` satisfies every bound and type constraint."""
        try:
            gamma = self._check_len(gamma, "value")
        except UsageError:
            return False
        for d, v in zip(self.dims, gamma):
            if not (math.isfinite(v) and d.min <= v <= d.max):
                return False
            if d.is_integer and v != math.floor(v):
                return False
        return True

    def _check_len(self, values, what) -> np.ndarray:
        arr = np.asarray(values, dtype=float)
        if arr.shape != (self.n,):
            raise UsageError(f"expected {self.n} {what}s, got shape {arr.shape}")
        return arr
