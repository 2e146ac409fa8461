"""Experiment and space definition files.

Space file, one dimension per line (``#`` starts a comment)::

    # name      kind   min    max    [grid values]
    neurons_1   int    5      15     5,15
    lr          float  1e-6   0.1

Experiment file, INI sections of ``key = value`` pairs::

    [experiment]
    objective = rastrigin          ; sphere | rastrigin | rosenbrock | mlp
    space = space.txt              ; relative to this file
    strategies = random, hbrkga    ; grid | random | brkga | hbrkga
    budget = 240
    runs = 10
    seed = 0
    output = out
    workers = 0                    ; 0 = one per available CPU

    [hbrkga]                       ; and/or [brkga]
    q_ind = 6
    ...

    [mlp]
    classes = 3
    per_class = 200
    spread = 0.4
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .brkga import BrkgaConfig
from .errors import ConfigError, UsageError
from .hyperspace import DimensionSpec, HyperSpace

STRATEGIES = ("grid", "random", "brkga", "hbrkga")
OBJECTIVES = ("sphere", "rastrigin", "rosenbrock", "mlp")
BRKGA_KEYS = {
    "q_ind": int, "q_e": int, "q_m": int, "phi_a": float,
    "nmov": int, "epsilon": float, "max_generations": int,
}


def parse_space(text: str, path=None) -> HyperSpace:
    dims = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (4, 5):
            raise ConfigError("expected: name kind min max [grid,values]", path=path, line=lineno)
        name, kind, lo, hi = parts[:4]
        try:
            grid = tuple(float(v) for v in parts[4].split(",") if v) if len(parts) == 5 else None
            dims.append(DimensionSpec(name, kind, float(lo), float(hi), grid))
        except (ValueError, UsageError) as exc:
            raise ConfigError(str(exc), path=path, line=lineno) from None
    try:
        return HyperSpace(dims)
    except UsageError as exc:
        raise ConfigError(str(exc), path=path) from None


def load_space(path) -> HyperSpace:
    return parse_space(Path(path).read_text(), path=path)


@dataclass
class MlpSettings:
    classes: int = 3
    per_class: int = 200
    spread: float = 0.4
    n_features: int = 2
    data_seed: int = 0
    data: Path | None = None
    ranges: str = "cosmos"
    max_epochs: int = 300
    patience: int = 13


@dataclass
class ExperimentConfig:
    objective: str
    space: HyperSpace
    strategies: list[str]
    budget: int = 240
    runs: int = 10
    seed: int = 0
    output: Path = Path("out")
    workers: int = 0  # 0 = available parallelism
    alpha: float = 0.05
    record_wall_time: bool = False
    brkga: dict[str, BrkgaConfig] = field(default_factory=dict)
    mlp: MlpSettings = field(default_factory=MlpSettings)
    path: Path | None = None

    def __post_init__(self):
        if self.budget < 1:
            raise UsageError("budget must be >= 1")
        if self.runs < 1:
            raise UsageError("runs must be >= 1")
        if not self.strategies:
            raise UsageError("at least one strategy is required")

    def brkga_config(self, strategy: str) -> BrkgaConfig:
        base = self.brkga.get(strategy)
        if base is None:
            base = BrkgaConfig() if strategy == "hbrkga" else BrkgaConfig(nmov=0)
        return base.with_(nmov=0) if strategy == "brkga" else base


class _Locator:
    """Finds the line where ``key`` is set inside ``[section]``, for error messages."""

    def __init__(self, text: str):
        self.lines = text.splitlines()

    def __call__(self, section: str, key: str | None = None) -> int | None:
        current = None
        for lineno, raw in enumerate(self.lines, start=1):
            line = raw.strip()
            m = re.match(r"\[(.+)\]", line)
            if m:
                current = m.group(1).strip()
                if key is None and current == section:
                    return lineno
                continue
            if current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", line):
                return lineno
        return None


def parse_experiment(text: str, path=None, base_dir=None) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=str(path or "<config>"))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ConfigError(exc.message.splitlines()[0], path=path, line=line) from None
    where = _Locator(text)
    base_dir = Path(base_dir) if base_dir is not None else (Path(path).parent if path else Path("."))

    def fail(msg, section, key=None):
        raise ConfigError(msg, path=path, line=where(section, key))

    def get(section, key, conv, default):
        if not parser.has_option(section, key):
            return default
        raw = parser.get(section, key)
        try:
            if conv is bool:
                return parser.getboolean(section, key)
            return conv(raw)
        except ValueError:
            fail(f"[{section}] {key}: cannot parse {raw!r} as {conv.__name__}", section, key)

    if not parser.has_section("experiment"):
        raise ConfigError("missing [experiment] section", path=path)
    known = {"experiment", "brkga", "hbrkga", "mlp"}
    for section in parser.sections():
        if section not in known:
            fail(f"unknown section [{section}]", section)

    ex = "experiment"
    allowed = {"objective", "space", "strategies", "budget", "runs", "seed", "output",
               "workers", "alpha", "record_wall_time"}
    for key in parser.options(ex):
        if key not in allowed:
            fail(f"unknown key {key!r} in [experiment]", ex, key)
    objective = get(ex, "objective", str, None)
    if objective not in OBJECTIVES:
        fail(f"objective must be one of {OBJECTIVES}, got {objective!r}", ex, "objective")
    strategies = [s.strip() for s in get(ex, "strategies", str, "").split(",") if s.strip()]
    if not strategies:
        fail("strategies must list at least one strategy", ex, "strategies")
    for s in strategies:
        if s not in STRATEGIES:
            fail(f"unknown strategy {s!r}; choose from {STRATEGIES}", ex, "strategies")
    if len(set(strategies)) != len(strategies):
        fail("strategies contains duplicates", ex, "strategies")

    mlp = MlpSettings()
    if parser.has_section("mlp"):
        for key in parser.options("mlp"):
            if key not in MlpSettings.__dataclass_fields__:
                fail(f"unknown key {key!r} in [mlp]", "mlp", key)
        mlp = MlpSettings(
            classes=get("mlp", "classes", int, mlp.classes),
            per_class=get("mlp", "per_class", int, mlp.per_class),
            spread=get("mlp", "spread", float, mlp.spread),
            n_features=get("mlp", "n_features", int, mlp.n_features),
            data_seed=get("mlp", "data_seed", int, mlp.data_seed),
            data=(base_dir / parser.get("mlp", "data")) if parser.has_option("mlp", "data") else None,
            ranges=get("mlp", "ranges", str, mlp.ranges),
            max_epochs=get("mlp", "max_epochs", int, mlp.max_epochs),
            patience=get("mlp", "patience", int, mlp.patience),
        )

    space_file = get(ex, "space", str, None)
    if space_file is not None:
        space = load_space(base_dir / space_file)
    elif objective == "mlp":
        from .learner import mlp_space

        try:
            space = mlp_space(mlp.ranges)
        except UsageError as exc:
            fail(str(exc), "mlp", "ranges")
    else:
        fail("a space file is required for synthetic objectives", ex, "objective")
    if objective == "mlp" and space.n != 5:
        fail(f"the mlp objective needs a 5-dimension space, got {space.n}", ex, "space")

    brkga = {}
    for section in ("brkga", "hbrkga"):
        if not parser.has_section(section):
            continue
        values = {}
        for key in parser.options(section):
            if key not in BRKGA_KEYS:
                fail(f"unknown key {key!r} in [{section}]", section, key)
            values[key] = get(section, key, BRKGA_KEYS[key], None)
        if section == "brkga":
            values.setdefault("nmov", 0)
        try:
            brkga[section] = BrkgaConfig(**values)
        except (UsageError, TypeError) as exc:
            fail(str(exc), section)

    output = Path(get(ex, "output", str, "out"))
    if not output.is_absolute():
        output = base_dir / output
    try:
        return ExperimentConfig(
            objective=objective,
            space=space,
            strategies=strategies,
            budget=get(ex, "budget", int, 240),
            runs=get(ex, "runs", int, 10),
            seed=get(ex, "seed", int, 0),
            output=output,
            workers=get(ex, "workers", int, 0),
            alpha=get(ex, "alpha", float, 0.05),
            record_wall_time=get(ex, "record_wall_time", bool, False),
            brkga=brkga,
            mlp=mlp,
            path=Path(path) if path else None,
        )
    except UsageError as exc:
        raise ConfigError(str(exc), path=path) from None


def load_experiment(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path=path) from None
    return parse_experiment(text, path=path)


def default_workers() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))
