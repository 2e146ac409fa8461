"""Command line entry point.

    hbrkga run <config>                 run an experiment, write CSV reports
    hbrkga validate <config>            parse a config and print its budget plans
    hbrkga compare <runlog> <runlog>    rank-sum test on per-run best scores
    hbrkga curve <runlog>...            mean best-so-far curve as CSV

Exit status: 0 success, 1 config error, 2 evaluation failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from .config import load_experiment
from .errors import ConfigError, UsageError
from .experiment import EXIT_CONFIG, EXIT_OK, plans_for, run_experiment
from .logs import collect_logs
from .stats import mean_curve, rank_sum_test, summarize_values


def _load(path):
    config = load_experiment(path)
    try:
        plans = plans_for(config)
    except UsageError as exc:
        raise ConfigError(str(exc), path=path) from None
    return config, plans


def cmd_run(args) -> int:
    config, _ = _load(args.config)
    if args.output:
        config.output = args.output
    return run_experiment(config, workers=args.workers)


def cmd_validate(args) -> int:
    config, plans = _load(args.config)
    print(f"objective: {config.objective} ({config.space.n} dims: {', '.join(config.space.names)})")
    print(f"budget: {config.budget}  runs: {config.runs}  seed: {config.seed}")
    for s, plan in plans.items():
        extra = ""
        if plan.brkga is not None:
            c = plan.brkga
            extra = (f"  generations={plan.generations} q_ind={c.q_ind} q_e={c.q_e} q_m={c.q_m} "
                     f"phi_a={c.phi_a} nmov={c.nmov} epsilon={c.epsilon}")
        elif plan.grid is not None:
            extra = f"  grid={'x'.join(map(str, plan.grid.counts))}"
        print(f"{s}: {plan.evaluations} evaluations{extra}")
    return EXIT_OK


def _bests(path):
    hists = collect_logs([path])
    strategies = sorted({s for s, _ in hists})
    return "+".join(strategies), [hists[k].best_score for k in sorted(hists)]


def cmd_compare(args) -> int:
    name_a, a = _bests(args.a)
    name_b, b = _bests(args.b)
    try:
        res = rank_sum_test(a, b, args.alpha)
    except UsageError as exc:
        raise ConfigError(str(exc)) from None
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["strategy_a", "strategy_b", "u", "p_value", "reject", "method"])
    w.writerow([name_a, name_b, repr(res.u), repr(res.p_value), str(res.reject).lower(), res.method])
    for name, xs in ((name_a, a), (name_b, b)):
        s = summarize_values(xs, name)
        std = "n/a" if s.std is None else f"{s.std:.6g}"
        print(f"{name}: runs={len(xs)} mean={s.mean:.6g} std={std}", file=sys.stderr)
    return EXIT_OK


def cmd_curve(args) -> int:
    hists = collect_logs(args.logs)
    try:
        curve = mean_curve([hists[k] for k in sorted(hists)])
    except UsageError as exc:
        raise ConfigError(str(exc)) from None
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["trial_index", "mean_best_so_far"])
        for i, v in enumerate(curve):
            w.writerow([i, repr(v)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbrkga", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None, help="process pool size (default: config, then CPU count)")
    p.add_argument("--output", default=None, help="override the output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check a config and print budget plans")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="rank-sum test between two sets of run logs")
    p.add_argument("a", help="trial CSV or directory of trial CSVs")
    p.add_argument("b", help="trial CSV or directory of trial CSVs")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("curve", help="mean best-so-far curve over run logs")
    p.add_argument("logs", nargs="+")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_curve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
