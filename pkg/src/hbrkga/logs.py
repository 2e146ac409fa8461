"""Reading and writing trial logs and experiment reports.

Trial CSV columns::

    strategy, run, trial_index, dim_0 .. dim_{n-1}, score, best_so_far, wall_time_s

Floats are written with ``repr`` so a row reads back to the identical value.
``wall_time_s`` is left empty unless wall times are recorded, which keeps
logs byte-stable across repeated runs.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from .errors import ConfigError
from .objective import RunHistory, TrialRecord

FIXED_HEAD = ["strategy", "run", "trial_index"]
FIXED_TAIL = ["score", "best_so_far", "wall_time_s"]


def _num(v: float) -> str:
    return repr(float(v))


def trial_header(n_dims: int) -> list[str]:
    return FIXED_HEAD + [f"dim_{i}" for i in range(n_dims)] + FIXED_TAIL


def trial_rows(history: RunHistory, run: int, record_wall_time: bool = False):
    for rec, best in zip(history.trials, history.best_so_far):
        wall = _num(rec.wall_time) if record_wall_time else ""
        yield [rec.strategy, str(run), str(rec.trial_index), *map(_num, rec.gamma), _num(rec.score), _num(best), wall]


def write_trials_csv(path, history: RunHistory, run: int, n_dims: int, record_wall_time: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trial_header(n_dims))
        w.writerows(trial_rows(history, run, record_wall_time))


def write_trials_jsonl(path, history: RunHistory, run: int, record_wall_time: bool = False) -> None:
    with open(path, "w") as fh:
        for rec, best in zip(history.trials, history.best_so_far):
            row = {
                "strategy": rec.strategy,
                "run": run,
                "trial_index": rec.trial_index,
                "gamma": list(rec.gamma),
                "score": rec.score,
                "best_so_far": best,
                "wall_time_s": rec.wall_time if record_wall_time else None,
            }
            fh.write(json.dumps(row) + "\n")


def read_trials_csv(path) -> dict[tuple[str, int], RunHistory]:
    """Histories keyed by ``(strategy, run)``, in file order."""
    out: dict[tuple[str, int], RunHistory] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("empty trial log", path=path) from None
        if header[:3] != FIXED_HEAD or header[-3:] != FIXED_TAIL:
            raise ConfigError("not a trial log (unexpected header)", path=path, line=1)
        n_dims = len(header) - 6
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ConfigError(f"expected {len(header)} fields, got {len(row)}", path=path, line=lineno)
            try:
                key = (row[0], int(row[1]))
                gamma = tuple(float(v) for v in row[3 : 3 + n_dims])
                rec = TrialRecord(row[0], int(row[2]), gamma, float(row[-3]), float(row[-1]) if row[-1] else 0.0)
                out.setdefault(key, RunHistory()).record(rec)
            except ValueError as exc:
                raise ConfigError(str(exc), path=path, line=lineno) from None
    return out


def collect_logs(paths: Iterable) -> dict[tuple[str, int], RunHistory]:
    """Load every trial CSV named directly or found (recursively) under a directory."""
    merged: dict[tuple[str, int], RunHistory] = {}
    for p in map(Path, paths):
        files = sorted(p.rglob("*.csv")) if p.is_dir() else [p]
        if not files:
            raise ConfigError("no trial logs found", path=p)
        for f in files:
            for key, hist in read_trials_csv(f).items():
                if key in merged:
                    raise ConfigError(f"run {key} appears in more than one log", path=f)
                merged[key] = hist
    return merged


def write_csv(path, header: list[str], rows: Iterable[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) if isinstance(v, float) else v for v in row])
