"""Experiment runner: `python src/main.py run convergence|sensitivity|identification [flags]`."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Callable

from pydantic import ValidationError

import SaveFile as Data
import settings
from harness import ExperimentConfig, OutputNotWritable, run_convergence, run_identification, run_stepsize_sensitivity
from problems import MODEL_TAGS, IdxFormatError, TooFewSamples, UnknownModel
from solvers import ScheduleRejected

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_REJECTED = 2

COMMANDS: dict[str, Callable[[ExperimentConfig], Any]] = {
    "convergence": run_convergence,
    "sensitivity": run_stepsize_sensitivity,
    "identification": run_identification,
}

# flags whose value is not an ExperimentConfig field
_RUNNER_FLAGS = ("action", "command", "config", "log_level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stepdecay", description="Geometric step decay experiments")
    actions = parser.add_subparsers(dest="action", required=True)
    run = actions.add_parser("run", help="run one experiment and write its table")
    run.add_argument("command", choices=sorted(COMMANDS))

    run.add_argument("--config", help="JSON config file; flags override its fields")
    run.add_argument("--log-level", default=None, help=f"logging level (default {settings.LOG_LEVEL})")

    run.add_argument("--problem", choices=["phase", "blind", "logistic"])
    run.add_argument("--model", choices=MODEL_TAGS)
    run.add_argument("--algorithm", choices=["rmba", "rpmba", "rda", "proxgrad-poly"])
    run.add_argument("--d", type=int)
    run.add_argument("--d2", type=int)
    run.add_argument("--pfail", dest="p_fail", type=float)
    run.add_argument("--noise-variance", type=float)
    run.add_argument("--mode", choices=["streaming", "finite"])
    run.add_argument("--m-samples", type=int)
    run.add_argument("--mc-samples", type=int)

    run.add_argument("--eps", type=float)
    run.add_argument("--gamma", type=float)
    run.add_argument("--delta2", type=float)
    run.add_argument("--delta-prime", type=float)
    run.add_argument("--r0", type=float)
    run.add_argument("--no-enforce-tube", dest="enforce_tube", action="store_const", const=False)
    run.add_argument("--inner-cap", type=int)
    run.add_argument("--stages", type=int)
    run.add_argument("--copies", type=int)
    run.add_argument("--inner-output", choices=["sampled", "average", "last"])
    run.add_argument("--schedule", choices=["convex", "nonconvex", "highprob"])

    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--checkpoints", type=int)

    run.add_argument("--exponent", type=int)
    run.add_argument("--p-min", type=int)
    run.add_argument("--p-max", type=int)
    run.add_argument("--sensitivity-trials", type=int)

    run.add_argument("--tau", type=float)
    run.add_argument("--n-samples", type=int)
    run.add_argument("--sparsity", type=int)
    run.add_argument("--init", choices=["zero", "reference"])
    run.add_argument("--idx-images")
    run.add_argument("--idx-labels")

    run.add_argument("--out")
    run.add_argument("--format", choices=["csv", "json"])
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {k: v for k, v in vars(args).items() if k not in _RUNNER_FLAGS and v is not None}
    if args.config is not None:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig(**overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        COMMANDS[args.command](config)
    except (ValidationError, ValueError, ScheduleRejected, TooFewSamples, UnknownModel) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except (OutputNotWritable, IdxFormatError, Data.NotFoundException, Data.InvalidDocument, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
