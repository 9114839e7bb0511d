"""Command-line interface.

    relaylab run --scenario <file> [--out <csv>] [--workers N] [--seed S]
                 [--trials T] [--analytic-only | --mc-only]
    relaylab figures [--out-dir DIR] [--workers N] [--seed S] [--trials T]
                 [--analytic-only | --mc-only]
    relaylab selftest

Exit codes: 0 success, 1 configuration error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .experiment import (ConfigError, emit_csv, parse_scenario_file,
                         run_scenario, shipped_scenario_path)
from .selftest import run_selftest

FIGURES = ("fig1", "fig2", "fig3", "fig4")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=1, metavar="N",
                   help="worker processes for the Monte-Carlo trials")
    p.add_argument("--seed", type=int, default=None, metavar="S",
                   help="override the scenario seeds (curve i uses S + i)")
    p.add_argument("--trials", type=int, default=None, metavar="T",
                   help="override trials_per_point")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--analytic-only", action="store_true",
                   help="skip the Monte-Carlo columns")
    g.add_argument("--mc-only", action="store_true",
                   help="skip the analytic columns")


def _run_file(path, args, out_path: Path) -> None:
    scenarios = parse_scenario_file(path)
    points = []
    for i, sc in enumerate(scenarios):
        if args.seed is not None:
            sc = dataclasses.replace(sc, seed=args.seed + i)
        points.extend(run_scenario(sc, workers=args.workers,
                                   trials_override=args.trials,
                                   analytic_only=args.analytic_only,
                                   mc_only=args.mc_only))
        print(f"  {sc.name}: {len(sc.snr_db)} points done", flush=True)
    emit_csv(points, out_path)
    print(f"wrote {out_path}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="relaylab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario file to CSV")
    run_p.add_argument("--scenario", required=True, metavar="FILE")
    run_p.add_argument("--out", default=None, metavar="CSV")
    _add_run_options(run_p)

    fig_p = sub.add_parser("figures", help="run the shipped fig1..fig4 scenarios")
    fig_p.add_argument("--out-dir", default="figures-out", metavar="DIR")
    _add_run_options(fig_p)

    sub.add_parser("selftest", help="run the numeric oracle suite")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            out = Path(args.out) if args.out else Path(Path(args.scenario).stem + ".csv")
            _run_file(args.scenario, args, out)
        elif args.command == "figures":
            out_dir = Path(args.out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            for fig in FIGURES:
                print(f"running {fig} ...", flush=True)
                _run_file(shipped_scenario_path(fig), args, out_dir / f"{fig}.csv")
        else:
            failed = 0
            for name, ok, detail in run_selftest():
                print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
                failed += 0 if ok else 1
            if failed:
                print(f"{failed} oracle check(s) failed", file=sys.stderr)
                return 2
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
