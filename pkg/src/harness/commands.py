"""The three experiment commands: run, aggregate, write."""

from __future__ import annotations

import logging

from FileSystem import result_path

from .aggregate import AggregateResult, convergence_table, identification_table, sensitivity_table
from .config import ExperimentConfig
from .emit import Table, emit
from .experiments import identification_paths, run_convergence_trials, sensitivity_trials

logger = logging.getLogger(__name__)


def _output_path(config: ExperimentConfig, command: str) -> str:
    return config.out if config.out is not None else result_path(f"{command}.{config.format}")


def run_convergence(config: ExperimentConfig) -> tuple[AggregateResult, Table]:
    """Seeded trials of the configured algorithm; writes one row per checkpoint."""
    results = run_convergence_trials(config)
    aggregate = AggregateResult.from_trials(results, config.eps)
    table = convergence_table(config, results)
    emit(table, config.format, _output_path(config, "convergence"))
    logger.info(
        "convergence: %d/%d trials reached eps=%.1e",
        aggregate.successes(config.eps),
        aggregate.trials,
        config.eps,
    )
    return aggregate, table


def run_stepsize_sensitivity(config: ExperimentConfig) -> Table:
    """Stepsize scaled by 2^p for every integer p in [p_min, p_max]."""
    table = sensitivity_table(config, sensitivity_trials(config))
    emit(table, config.format, _output_path(config, "sensitivity"))
    return table


def run_identification(config: ExperimentConfig) -> Table:
    """RMBA against RDA and the polynomial baselines on a sparse logistic instance."""
    instance, schedule, paths = identification_paths(config)
    table = identification_table(config, instance, schedule, paths)
    emit(table, config.format, _output_path(config, "identification"))
    return table
