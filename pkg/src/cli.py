"""
Command-line entry point: generate, label, train, eval and oracle.

Results go to standard output; logs go to standard error. A failing command
exits with a category code and writes one line to standard error:

    error=<category> message="<json-quoted message>"
"""
import argparse
import enum
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from src.config import get_app_config
from src.errors import (
    ConfigError,
    DataFormatError,
    DegenerateGeometryError,
    InfeasibleInstanceError,
    ShapeMismatchError,
    TrainingError,
)
from src.evaluation import evaluate, write_report
from src.oracle import default_limit, label_dataset, read_labeled, solve_optimal, write_labeled
from src.scenario import as_rate_matrix, generate_dataset, load_scenario_config, read_dataset, write_dataset
from src.training import load_checkpoint, load_train_config, save_checkpoint, train, write_history
from src.utils import canonical_json, format_number, setup_logging

logger = logging.getLogger(__name__)


class ExitCode(enum.IntEnum):
    SUCCESS = 0
    UNEXPECTED = 1
    CONFIG_ERROR = 2
    INFEASIBLE = 3
    IO_ERROR = 4
    INTERRUPTED = 130


ERROR_CATEGORIES = {
    ExitCode.UNEXPECTED: "internal",
    ExitCode.CONFIG_ERROR: "config",
    ExitCode.INFEASIBLE: "infeasible",
    ExitCode.IO_ERROR: "io",
    ExitCode.INTERRUPTED: "interrupted",
}


def categorize_error(exc: BaseException) -> ExitCode:
    """
    Map an exception onto the exit code of its category.

    Args:
        exc: The exception that ended the command

    Returns:
        The matching ExitCode; UNEXPECTED for anything outside the pipeline's hierarchy
    """
    # InfeasibleInstanceError is also a ValueError, so it is checked first
    if isinstance(exc, InfeasibleInstanceError):
        return ExitCode.INFEASIBLE
    if isinstance(exc, (ConfigError, DegenerateGeometryError, TrainingError)):
        return ExitCode.CONFIG_ERROR
    if isinstance(exc, (DataFormatError, ShapeMismatchError, OSError)):
        return ExitCode.IO_ERROR
    if isinstance(exc, KeyboardInterrupt):
        return ExitCode.INTERRUPTED
    return ExitCode.UNEXPECTED


def cmd_generate(args: argparse.Namespace) -> None:
    cfg = load_scenario_config(args.config, seed=args.seed)
    ds = generate_dataset(cfg, jobs=args.jobs)
    write_dataset(ds, args.out)


def cmd_label(args: argparse.Namespace) -> None:
    ds = read_dataset(args.input)
    labeled = label_dataset(ds, limit=args.limit, jobs=args.jobs)
    write_labeled(labeled, args.out)


def cmd_train(args: argparse.Namespace) -> None:
    cfg = load_train_config(args.config, seed=args.seed)
    data = read_labeled(args.input)
    ckpt, history = train(args.model, data, cfg)
    save_checkpoint(ckpt, args.out)
    if args.history:
        write_history(history, args.history)


def cmd_eval(args: argparse.Namespace) -> None:
    ckpt = load_checkpoint(args.model)
    data = read_labeled(args.input)
    report = evaluate(ckpt.model, data, jobs=args.jobs)
    write_report(report, args.json, args.csv)
    print(canonical_json(report.summary))


def cmd_oracle(args: argparse.Namespace) -> None:
    try:
        rates = as_rate_matrix(json.loads(args.rates))
    except (json.JSONDecodeError, DataFormatError, ShapeMismatchError) as e:
        raise ConfigError(f"--rates must be a JSON matrix of non-negative numbers: {e}") from e
    limit = args.limit if args.limit is not None else default_limit(*rates.shape)
    assoc, total = solve_optimal(rates, limit)
    print(f"{json.dumps(list(assoc), separators=(',', ':'))} {format_number(total)}")


def build_parser(app_config: Dict[str, Any]) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    common.add_argument("--log-file", type=str, default=app_config["log_file"], help="Path to log file")

    parallel = argparse.ArgumentParser(add_help=False)
    parallel.add_argument("--jobs", type=int, default=app_config["jobs"],
                          help="Worker processes (results are identical for any value)")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=None,
                        help="Seed; overrides the config file and SPIKE_ASSOC_SEED")

    parser = argparse.ArgumentParser(
        prog="spike-assoc",
        description="Spiking-network UE-to-transmitter association: data, oracle, training, evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common, parallel, seeded], help="Generate a scenario dataset")
    p.add_argument("--config", required=True, help="Scenario JSON config")
    p.add_argument("--out", required=True, help="Output dataset (JSON Lines)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("label", parents=[common, parallel], help="Label a dataset with optimal associations")
    p.add_argument("--in", dest="input", required=True, help="Dataset (JSON Lines)")
    p.add_argument("--out", required=True, help="Output labeled dataset (JSON Lines)")
    p.add_argument("--limit", type=int, default=None, help="Per-TX capacity L (default ceil(N/M)+1)")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("train", parents=[common, seeded], help="Train a top-down or bottom-up model")
    p.add_argument("--model", required=True, choices=["topdown", "bottomup"], help="Model kind")
    p.add_argument("--in", dest="input", required=True, help="Labeled dataset (JSON Lines)")
    p.add_argument("--out", required=True, help="Output checkpoint (JSON)")
    p.add_argument("--config", default=None, help="Training JSON config")
    p.add_argument("--history", default=None, help="Optional per-epoch history CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", parents=[common, parallel], help="Evaluate a checkpoint on labeled data")
    p.add_argument("--model", required=True, help="Checkpoint (JSON)")
    p.add_argument("--in", dest="input", required=True, help="Labeled dataset (JSON Lines)")
    p.add_argument("--json", default=None, help="Full report output (JSON)")
    p.add_argument("--csv", default=None, help="Per-step report output (CSV)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", parents=[common], help="Solve one rate matrix exhaustively")
    p.add_argument("--rates", required=True, help='Rate matrix as JSON, e.g. "[[5,1],[4,2],[3,3]]"')
    p.add_argument("--limit", type=int, default=None, help="Per-TX capacity L (default ceil(N/M)+1)")
    p.set_defaults(func=cmd_oracle)

    return parser


def report_failure(command: str, exc: BaseException) -> int:
    """Log ``exc`` and write the one-line error record; returns the exit code."""
    code = categorize_error(exc)
    logger.error(f"{command} failed: {exc}", exc_info=code == ExitCode.UNEXPECTED)
    print(f"error={ERROR_CATEGORIES[code]} message={json.dumps(str(exc))}", file=sys.stderr)
    return int(code)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, dispatch the subcommand and translate failures to exit codes.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        Process exit code
    """
    try:
        app_config = get_app_config()
    except ConfigError as e:
        return report_failure("startup", e)

    parser = build_parser(app_config)
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return int(e.code) if e.code is not None else int(ExitCode.SUCCESS)

    setup_logging(verbose=args.verbose, log_file=args.log_file, level=app_config["log_level"])

    try:
        args.func(args)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return int(ExitCode.INTERRUPTED)
    except Exception as e:
        return report_failure(args.command, e)
    return int(ExitCode.SUCCESS)


def main(argv: Optional[List[str]] = None) -> None:
    """Main execution function."""
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
