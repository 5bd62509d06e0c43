"""Command-line interface and main entry point for sqicube."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .experiments import (
    DEFAULT_WAVENUMBER,
    ConfigError,
    ExperimentConfig,
    Pipeline,
    apply_overrides,
    check_acceptance,
    compare_runs,
    load_config,
    preset,
    reference_request,
    resolve_threads,
    run_experiment,
)
from .quasi_interp import QI_BACKENDS
from .reference_oracle import OracleConvergenceError, reference_integral
from .report import (
    ErrorTable,
    SchemaMismatchError,
    check_golden,
    format_table,
    read_csv,
    read_references,
    references_path,
    run_log_path,
    write_csv,
    write_references,
    write_run_log,
)

log = logging.getLogger(__name__)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(item) for item in text.replace(" ", ",").split(",") if item)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("the list of N values is empty")
    return values


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(item) for item in text.replace(" ", ",").split(",") if item)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers: {text!r}") from None


def _add_experiment_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="Experiment manifest (INI with [experiment] sections).",
    )
    parser.add_argument(
        "--example",
        type=int,
        choices=(1, 2, 3, 4),
        default=None,
        help="Run one of the four reference experiments.",
    )
    parser.add_argument("--d", type=int, default=None, help="Degree of the B-spline weight.")
    parser.add_argument("--p", type=int, default=None, help="Degree of the quasi-interpolant.")
    parser.add_argument(
        "--N",
        dest="n_values",
        type=_int_list,
        default=None,
        help="Comma-separated numbers of QI intervals per direction (default: 6,8,10,12,14).",
    )
    parser.add_argument("--surface", default=None, help="Surface name: plane, cylinder, hyperboloid.")
    parser.add_argument(
        "--surface-params",
        type=_float_list,
        default=None,
        help="Comma-separated surface parameters (cylinder: radius, fraction).",
    )
    parser.add_argument(
        "--pipeline",
        choices=[p.value for p in Pipeline],
        default=None,
        help="How the kernel is handled: direct, multiplicative or subtractive.",
    )
    parser.add_argument("--function", default=None, help="Integrand name, e.g. exp or helmholtz.")
    parser.add_argument("--gauss-order", type=int, default=None, help="Gauss points per direction.")
    parser.add_argument("--grading", type=float, default=None, help="Geometric grading ratio.")
    parser.add_argument(
        "--moment-tol", type=float, default=None, help="Target accuracy of the modified moments."
    )
    parser.add_argument(
        "--qi-backend",
        choices=sorted(QI_BACKENDS),
        default=None,
        help="Quasi-interpolation coefficient rule (default: nearest).",
    )
    parser.add_argument(
        "--wavenumber",
        type=float,
        default=None,
        help=f"Wave number of the helmholtz integrand (default: {DEFAULT_WAVENUMBER:.6f}).",
    )
    parser.add_argument(
        "--relative",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Report errors relative to the reference value.",
    )


def create_parser() -> argparse.ArgumentParser:
    """Create and return the argument parser."""

    parser = argparse.ArgumentParser(
        prog="sqicube",
        description=(
            "Cubature rules for weakly and nearly singular integrals over a B-spline "
            "weight, based on spline quasi-interpolation and modified moments."
        ),
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="count",
        default=0,
        help="Log progress (-v) or debugging details (-vv) to stderr.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run convergence experiments and write error tables.")
    _add_experiment_options(run)
    run.add_argument(
        "--out",
        type=Path,
        default=None,
        help="CSV output path (default: <name>.csv in the current directory).",
    )
    run.add_argument(
        "--with-oracle",
        action="store_true",
        default=False,
        help="Recompute reference integrals instead of reading the cached ones.",
    )
    run.add_argument(
        "--check",
        action="store_true",
        default=False,
        help="Exit with status 1 when an acceptance tolerance is violated.",
    )

    check = commands.add_parser("check", help="Compare an error table against a golden table.")
    check.add_argument("table", type=Path, help="CSV produced by 'sqicube run'.")
    check.add_argument("golden", type=Path, help="Golden CSV to compare against.")
    check.add_argument("--rtol", type=float, default=1e-2, help="Relative tolerance on errors.")
    check.add_argument(
        "--order-tol", type=float, default=0.5, help="Absolute tolerance on convergence orders."
    )

    oracle = commands.add_parser("oracle", help="Compute one reference integral.")
    _add_experiment_options(oracle)
    oracle.add_argument(
        "--s",
        nargs=2,
        type=float,
        required=True,
        metavar=("S1", "S2"),
        help="Source point.",
    )
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("sqicube").setLevel(level)


def _resolve_configs(args: argparse.Namespace) -> list[ExperimentConfig]:
    config_path: Path | None = args.config
    example: int | None = args.example
    if config_path is not None:
        configs = load_config(config_path)
    elif example is not None:
        configs = [preset(example)]
    else:
        raise ConfigError("either --config or --example is required")
    pipeline: str | None = args.pipeline
    overrides = {
        "example": example if config_path is not None else None,
        "d": args.d,
        "p": args.p,
        "n_values": args.n_values,
        "surface": args.surface,
        "surface_params": args.surface_params,
        "pipeline": Pipeline(pipeline) if pipeline is not None else None,
        "function": args.function,
        "gauss_order": args.gauss_order,
        "grading": args.grading,
        "target_accuracy": args.moment_tol,
        "qi_backend": args.qi_backend,
        "wavenumber": args.wavenumber,
        "relative": args.relative,
        "out": getattr(args, "out", None),
    }
    return [apply_overrides(config, **overrides) for config in configs]


def _run(args: argparse.Namespace) -> int:
    with_oracle: bool = args.with_oracle
    check: bool = args.check
    configs = _resolve_configs(args)
    threads = resolve_threads()

    status = 0
    finished: list[tuple[ExperimentConfig, ErrorTable]] = []
    for config in configs:
        out = config.out if config.out is not None else Path(f"{config.name}.csv")
        cache = references_path(out)
        references = None if with_oracle else read_references(cache, config.reference_key())
        result = run_experiment(config, references=references, threads=threads)
        finished.append((config, result.table))
        write_csv(result.table, out)
        write_references(result.references, config.reference_key(), cache)

        print(f"{config.name} (d={config.d}, p={config.p}, {config.pipeline.value})")
        print(format_table(result.table))
        acceptance = None
        if check:
            report = check_acceptance(config, result.table)
            acceptance = report.messages
            for message in report.messages:
                print(message)
            if not report.passed:
                status = 1
        write_run_log(result, run_log_path(out), acceptance)
        print(f"Table written to: {out}\n")
    if check and len(finished) > 1:
        report = compare_runs(finished)
        for message in report.messages:
            print(message)
        if not report.passed:
            status = 1
    return status


def _check(args: argparse.Namespace) -> int:
    table_path: Path = args.table
    golden_path: Path = args.golden
    rtol: float = args.rtol
    order_tol: float = args.order_tol
    report = check_golden(read_csv(table_path), read_csv(golden_path), rtol=rtol, order_tol=order_tol)
    if report.passed:
        print(f"PASS: {table_path} matches {golden_path}")
        return 0
    for mismatch in report.mismatches:
        print(f"  MISMATCH {mismatch}", file=sys.stderr)
    print(f"FAIL: {len(report.mismatches)} cell(s) differ", file=sys.stderr)
    return 1


def _oracle(args: argparse.Namespace) -> int:
    s = (float(args.s[0]), float(args.s[1]))
    config = _resolve_configs(args)[0]
    surface = config.build_surface()
    request = reference_request(config, config.weight(), surface, s)
    result = reference_integral(request)
    print(f"value          = {result.value:.16e}")
    print(f"error estimate = {result.error_estimate:.3e}")
    print(f"cells          = {result.n_cells}")
    return 0


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the CLI.

    Args:
        argv: Command-line arguments (defaults to ``sys.argv[1:]``).

    Returns:
        Exit code: 0 on success, 1 on failed checks or runtime errors, 2 on
        usage or configuration errors.
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    command: str = args.command
    verbosity: int = args.verbose
    _configure_logging(verbosity)

    try:
        if command == "run":
            return _run(args)
        if command == "check":
            return _check(args)
        return _oracle(args)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except SchemaMismatchError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except OracleConvergenceError as e:
        print(
            f"Error: {e} (best estimate {e.best_estimate:.16e}, error {e.error_estimate:.2e})",
            file=sys.stderr,
        )
        return 1
    except (ValueError, ArithmeticError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
