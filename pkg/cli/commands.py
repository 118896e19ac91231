"""
Command Line Interface
solve and batch commands on top of the solver drivers.
"""

import argparse
import json
import sys
import time
from typing import List, Optional, Sequence

from cli.operator_parser import parse_operator
from cli.report import SolveReport
from config.settings import Settings, SolveConfig
from core.batch_runner import BatchRunner
from core.exceptions import ConfigError, HypSolveError, InvalidOperator, Unsupported
from core.intbasis import hypergeometricsols
from core.quotient_lift import SearchStats, find_2f1, validate_operator
from core.results_store import ResultsStore
from utils.environment import memory_usage_mb
from utils.logger import set_console_level, setup_logger

logger = setup_logger(__name__)

MODE_ALIASES = {"find2f1-only": "find2f1"}


def solve_command(text: str, cfg: SolveConfig) -> SolveReport:
    """
    Parse, validate and solve one operator.

    Args:
        text: Operator expression
        cfg: Validated solver configuration

    Returns:
        SolveReport; errors are folded into its status
    """
    stats = SearchStats()
    start = time.perf_counter()

    def diagnostics() -> dict:
        data = stats.to_dict()
        data["elapsed"] = round(time.perf_counter() - start, 3)
        data["memory_mb"] = memory_usage_mb()
        data["mode"] = cfg.mode
        return data

    try:
        op = parse_operator(text)
        if cfg.mode == "find2f1":
            validate_operator(op)
            solutions = find_2f1(op, cfg.a_fmax, cfg, stats, validate=False)
        else:
            solutions = hypergeometricsols(op, cfg.a_fmax, cfg, stats, direct=cfg.mode == "auto")
    except InvalidOperator as e:
        logger.warning(f"Invalid input: {e}")
        return SolveReport.failure("invalid-input", str(e), text, diagnostics())
    except Unsupported as e:
        logger.warning(f"Unsupported input: {e}")
        return SolveReport.failure("unsupported", str(e), text, diagnostics())
    except HypSolveError as e:
        logger.warning(f"Solver gave up: {type(e).__name__}: {e}")
        return SolveReport.failure("no-solution-found", f"{type(e).__name__}: {e}", text, diagnostics())

    report = SolveReport.from_solutions(solutions, diagnostics(), text)
    logger.info(f"Solve finished with status {report.status}")
    return report


def read_batch_file(path: str) -> List[str]:
    """Operator lines of a batch file; blank lines and '#' comments are skipped."""
    with open(path, encoding="utf-8") as handle:
        lines = [line.split("#", 1)[0].strip() for line in handle]
    return [line for line in lines if line]


def _error_report(text: str, error: Exception) -> SolveReport:
    return SolveReport.failure("no-solution-found", f"{type(error).__name__}: {error}", text)


def batch_command(path: str, cfg: SolveConfig, store: Optional[ResultsStore] = None,
                  workers: Optional[int] = None) -> List[SolveReport]:
    """
    Solve every operator of a batch file.

    Args:
        path: File with one operator expression per line
        cfg: Validated solver configuration
        store: Records the run and its reports when given
        workers: Worker thread count override

    Returns:
        Reports in file order
    """
    entries = read_batch_file(path)
    logger.info(f"Batch {path}: {len(entries)} operator(s)")
    runner = BatchRunner(lambda text: solve_command(text, cfg), _error_report, workers)
    if store is not None:
        run_id = store.start_run(path, cfg.to_dict())
        runner.register_report_callback(
            lambda index, text, report: store.add_report(run_id, index + 1, text, report.to_dict())
        )
    return runner.run(entries)


def summarize(reports: Sequence[SolveReport]) -> dict:
    """Status counts of a batch, every status present."""
    counts = {status: 0 for status in Settings.EXIT_CODES}
    for report in reports:
        counts[report.status] += 1
    counts["total"] = len(reports)
    return counts


def render_summary(counts: dict) -> str:
    width = max(len(k) for k in counts)
    rows = [f"{'status'.ljust(width)}  count", f"{'-' * width}  -----"]
    rows.extend(f"{k.ljust(width)}  {v:5d}" for k, v in counts.items())
    return "\n".join(rows)


def _add_solver_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--prime", type=int, default=None, help=f"Sweep prime (default: {Settings.DEFAULT_PRIME}).")
    parser.add_argument("--retry-prime", type=int, default=None, dest="retry_prime",
                        help=f"Prime used when the first fails (default: {Settings.RETRY_PRIME}).")
    parser.add_argument("--afmax", type=int, choices=[1, 2], default=None, dest="a_fmax",
                        help=f"Largest algebraic degree of the pullback (default: {Settings.AF_MAX}).")
    parser.add_argument("--precision-factor", type=str, default=None, dest="precision_factor",
                        help="Multiplier (>= 1, may be a fraction) of the working precision.")
    parser.add_argument("--max-lift-bits", type=int, default=None, dest="max_lift_bits",
                        help=f"Stop lifting beyond this modulus size (default: {Settings.MAX_LIFT_BITS}).")
    parser.add_argument("--mode", choices=Settings.MODES + list(MODE_ALIASES), default=None,
                        help="auto: find2f1 then gauge reduction; find2f1: direct only; gauge: basis elements only.")
    parser.add_argument("--json", action="store_true", help="Print JSON instead of text.")
    parser.add_argument("--db", type=str, default=None, help="Record the run in this SQLite file.")
    parser.add_argument("--log-level", type=str, default=None, dest="log_level",
                        help=f"Console log level (default: {Settings.CONSOLE_LOG_LEVEL}).")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypsolve",
        description="Find solutions exp(int r)*2F1(a1, a2; b1; f) of second order linear differential operators.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Solve one operator given as an expression in x and Dx.")
    solve.add_argument("operator", help='Operator, e.g. "x*(1-x)*Dx^2 + (1-2*x)*Dx - 1/4".')
    _add_solver_flags(solve)

    batch = commands.add_parser("batch", help="Solve every operator of a file, one per line.")
    batch.add_argument("path", help="Batch file; '#' starts a comment.")
    batch.add_argument("--workers", type=int, default=None, help=f"Worker threads (env {Settings.THREADS_ENV_VAR}).")
    _add_solver_flags(batch)
    return parser


def config_from_args(args: argparse.Namespace) -> SolveConfig:
    """
    Raises:
        ConfigError: out-of-range option
    """
    mode = MODE_ALIASES.get(args.mode, args.mode)
    return SolveConfig.from_settings(
        prime=args.prime,
        retry_prime=args.retry_prime,
        a_fmax=args.a_fmax,
        precision_factor=args.precision_factor,
        max_lift_bits=args.max_lift_bits,
        mode=mode,
        output="json" if args.json else None,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line.

    Returns:
        int: Exit code (0 solved, 1 no solution found, 2 unsupported, 3 invalid input)
    """
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_console_level(args.log_level)
    try:
        cfg = config_from_args(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return Settings.EXIT_CODES["invalid-input"]

    store = ResultsStore(args.db) if args.db else None

    if args.command == "solve":
        report = solve_command(args.operator, cfg)
        if store is not None:
            run_id = store.start_run(args.operator, cfg.to_dict())
            store.add_report(run_id, 1, args.operator, report.to_dict())
        print(report.to_json() if cfg.output == "json" else report.render_text())
        return report.exit_code

    try:
        reports = batch_command(args.path, cfg, store, args.workers)
    except OSError as e:
        print(f"error: cannot read batch file: {e}", file=sys.stderr)
        return Settings.EXIT_CODES["invalid-input"]
    counts = summarize(reports)
    if cfg.output == "json":
        print(json.dumps({"reports": [r.to_dict() for r in reports], "summary": counts}, indent=2, ensure_ascii=False))
    else:
        for index, report in enumerate(reports, 1):
            print(f"[{index}] {report.render_text()}")
            print()
        print(render_summary(counts))
    return Settings.EXIT_CODES["solved"]
