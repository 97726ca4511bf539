"""Main entry point for the rank-one phase-transition toolkit."""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from runner.infrastructure.experiment_loader import load_experiment
from runner.infrastructure.output_writer import write_errors
from runner.services.commands import COMMANDS, CommandResult, create_context
from shared.config.config import WORKERS_ENV, config
from shared.domain.consts import CommandName, OutputFiles
from shared.domain.errors import ExperimentConfigError
from shared.domain.payloads import ExperimentConfig

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s - %(message)s"

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Phase transitions of symmetric rank-one matrix estimation with discrete priors.",
    )
    parser.add_argument("command", choices=[c.value for c in CommandName], help="Subcommand to run")
    parser.add_argument("--config", required=True, type=Path, help="Experiment config (INI or .json)")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (overrides the config)")
    parser.add_argument("--workers", type=int, default=None,
                        help=f"Sweep worker pool size ({WORKERS_ENV} takes precedence)")
    parser.add_argument("--quad-order", type=int, default=None, help="Gauss-Hermite order")
    parser.add_argument("--tol", type=float, default=None, help="Convergence tolerance")
    parser.add_argument("--log-level", default=None, help="Logging level (default from env)")
    return parser


def resolve_workers(requested: Optional[int]) -> int:
    """Worker count: the environment variable beats the flag, which beats the machine default."""
    if os.getenv(WORKERS_ENV):
        return config.WORKERS
    if requested is not None:
        if requested < 1:
            raise ValueError(f"Invalid worker count: {requested}")
        return requested
    return config.WORKERS


def apply_overrides(experiment: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Command-line flags replace config values; the result is validated again."""
    overrides = {
        key: value
        for key, value in (("seed", args.seed), ("quad_order", args.quad_order), ("tol", args.tol))
        if value is not None
    }
    if not overrides:
        return experiment
    return ExperimentConfig.model_validate({**experiment.model_dump(), **overrides})


def _fail(out_dir: Path, command: str, errors: List[dict]) -> int:
    """Write errors.json, echo the same summary to stderr, and return the exit code."""
    summary = {"command": command, "failed": len(errors), "errors": errors}
    try:
        write_errors(out_dir / OutputFiles.ERRORS, command, errors)
    except OSError as e:
        logger.error(f"Could not write error summary to {out_dir}: {e}")
    print(json.dumps(summary, default=str), file=sys.stderr)
    return 1


def main(argv: Optional[List[str]] = None) -> int:
    """Main execution function; returns the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=(args.log_level or config.LOG_LEVEL).upper(), format=LOG_FORMAT)
    command = CommandName(args.command)
    fallback_dir = args.out or Path(config.OUTPUT_DIR)

    try:
        experiment = apply_overrides(load_experiment(args.config), args)
    except (ExperimentConfigError, ValidationError) as e:
        logger.error(f"Invalid experiment config: {e}")
        return _fail(fallback_dir, command.value, [{"stage": "config", "error": str(e)}])

    out_dir = args.out or Path(experiment.output_dir or config.OUTPUT_DIR)
    try:
        workers = resolve_workers(args.workers)
    except ValueError as e:
        return _fail(out_dir, command.value, [{"stage": "arguments", "error": str(e)}])

    logger.info(f"Running {command.value} with config {args.config} -> {out_dir} (workers={workers})")
    context = create_context(command, experiment, out_dir, workers)
    try:
        result: CommandResult = COMMANDS[command](context)
    except Exception as e:
        logger.error(f"{command.value} failed: {e}", exc_info=True)
        return _fail(out_dir, command.value, [{"stage": "command", "error": f"{type(e).__name__}: {e}"}])

    for path in result.files:
        print(path)
    if not result.ok:
        logger.warning(f"{command.value} finished with {len(result.errors)} failed point(s)")
        return _fail(out_dir, command.value, result.errors)

    logger.info(f"{command.value} completed: {len(result.files)} file(s) written")
    return 0


if __name__ == "__main__":
    sys.exit(main())
