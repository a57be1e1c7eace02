"""Command-line interface.

Subcommands:
  simulate  run an experiment from a JSON config and write the series CSV
  report    recompute trend metrics from a previously written series CSV
  oracle    check the analytic full-collection cost against brute force

Exit codes: 0 success, 1 validation/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .analysis import coupon_oracle, read_series_csv, trend_report, write_series_csv
from .config import ConfigError, parse_config
from .core import derive_stream
from .harness import run_experiment, validate_spec
from .serverfi import expected_collection_cost

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems with exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gamefi-sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")

    simulate = sub.add_parser("simulate", help="run an experiment and write its series CSV")
    simulate.add_argument("--config", required=True, help="path to a JSON config document")
    simulate.add_argument("--out", required=True, help="path for the aggregate series CSV")
    simulate.add_argument("--seed", type=int, default=None, help="override master_seed")
    simulate.add_argument("--iterations", type=int, default=None, help="override iterations")
    simulate.add_argument("--repeats", type=int, default=None, help="override repeats")
    simulate.add_argument("--report", default=None, help="also write trend metrics as JSON")
    simulate.add_argument("--workers", type=int, default=1,
                          help="process pool size for repeats (result is identical for any value)")

    report = sub.add_parser("report", help="recompute trend metrics from a series CSV")
    report.add_argument("--in", dest="source", required=True, help="path to a series CSV")

    oracle = sub.add_parser("oracle", help="compare analytic collection cost with brute force")
    oracle.add_argument("--k", type=int, required=True, help="number of fragment types")
    oracle.add_argument("--trials", type=int, required=True, help="simulated collections")
    oracle.add_argument("--seed", type=int, default=0, help="stream seed")
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        text = open(args.config, "r", encoding="utf-8").read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        spec = parse_config(text)
        overrides = {}
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.iterations is not None:
            overrides["iterations"] = args.iterations
        if args.repeats is not None:
            overrides["repeats"] = args.repeats
        if overrides:
            spec = spec.with_overrides(**overrides)
        validate_spec(spec)
        if args.workers < 1:
            raise ConfigError("workers must be at least 1")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    series, _ = run_experiment(spec, workers=args.workers)
    try:
        write_series_csv(series, args.out)
        if args.report is not None:
            payload = json.dumps(trend_report(series).to_dict(), indent=2) + "\n"
            with open(args.report, "w", encoding="utf-8") as handle:
                handle.write(payload)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(
        f"wrote {args.out} (model={spec.model}, "
        f"{spec.iterations} iterations x {spec.repeats} repeats, seed={spec.master_seed})"
    )
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    try:
        series = read_series_csv(args.source)
    except OSError as exc:
        print(f"error: cannot read series: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        report = trend_report(series)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace) -> int:
    try:
        if args.k < 1:
            raise ValueError("k must be at least 1")
        if args.trials < 1:
            raise ValueError("trials must be at least 1")
        rng = derive_stream(args.seed, 0)
        estimate = coupon_oracle(args.k, args.trials, rng)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    analytic = expected_collection_cost(args.k, 1.0)
    relative = abs(estimate - analytic) / analytic
    print(f"analytic_cost={analytic:.6g}")
    print(f"monte_carlo_mean={estimate:.6g}")
    print(f"relative_error={relative:.6g}")
    return EXIT_OK


def cli_main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("error: a subcommand is required (simulate, report, oracle)", file=sys.stderr)
        return EXIT_VALIDATION
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "report":
        return _cmd_report(args)
    return _cmd_oracle(args)


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
