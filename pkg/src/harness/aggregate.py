"""Statistics across trials and the output tables of each experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from problems import LogisticInstance
from solvers import Schedule

from .config import ExperimentConfig
from .emit import Table
from .experiments import IdentificationPath, TrialResult, identification_rows, reference_rate, samples_to_target

CONVERGENCE_COLUMNS = ("trial", "stage", "inner_iter", "samples", "dist", "loss", "wall_ms")
SENSITIVITY_COLUMNS = ("model", "p", "mean_iters", "std_iters", "mean_final_dist", "std_final_dist")
IDENTIFICATION_COLUMNS = ("method", "iter", "fval_gap", "dist_support", "dist_to_reference")

_FLOOR = 1e-300


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (n - 1 denominator; nan for a single value)."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        return math.nan, math.nan
    return float(data.mean()), float(data.std(ddof=1)) if data.size > 1 else math.nan


@dataclass
class Checkpoint:
    stage: int
    inner_iter: int
    samples: int
    mean_log_dist: float
    std_log_dist: float


@dataclass
class AggregateResult:
    """
    Per-checkpoint statistics of log10(dist) across trials, plus per-trial summaries.

    Attributes:
        trials (int): Number of trials aggregated.
        checkpoints (list[Checkpoint]): Aligned by record index across trials.
        samples_to_target (list[float]): Samples until dist <= eps per trial (capped).
        final_dist (list[float]): Final distance per trial.
    """

    trials: int
    checkpoints: list[Checkpoint] = field(default_factory=list)
    samples_to_target: list[float] = field(default_factory=list)
    final_dist: list[float] = field(default_factory=list)

    @classmethod
    def from_trials(cls, results: Sequence[TrialResult], target: float) -> AggregateResult:
        aggregate = cls(len(results))
        if not results:
            return aggregate
        length = min(len(r.trace.records) for r in results)
        for i in range(length):
            first = results[0].trace.records[i]
            logs = [math.log10(max(r.trace.records[i].dist, _FLOOR)) for r in results]
            mean, std = mean_std(logs)
            aggregate.checkpoints.append(Checkpoint(first.stage, first.inner_iter, first.samples, mean, std))
        aggregate.samples_to_target = [samples_to_target(r, target) for r in results]
        aggregate.final_dist = [r.trace.final.dist for r in results]
        return aggregate

    def successes(self, threshold: float) -> int:
        return sum(d <= threshold for d in self.final_dist)


def schedule_header(schedule: Schedule, config: ExperimentConfig, **extra) -> dict:
    header = dict(schedule.header())
    header.update(
        kind=schedule.kind,
        R0=schedule.radius,
        eps=schedule.target,
        sample_bound=schedule.sample_bound,
        success_probability=schedule.success_probability,
    )
    header.update(extra)
    header["config"] = config.model_dump(exclude={"out", "format", "workers"})
    return header


def convergence_table(config: ExperimentConfig, results: Sequence[TrialResult]) -> Table:
    """One row per (trial, stage, checkpoint) and the reference rate rows dist_t = 2^-t R0."""
    table = Table(CONVERGENCE_COLUMNS)
    if not results:
        return table
    schedule = results[0].schedule
    table.header = schedule_header(schedule, config)
    for result in results:
        table.extend(
            {
                "trial": r.trial,
                "stage": r.stage,
                "inner_iter": r.inner_iter,
                "samples": r.samples,
                "dist": r.dist,
                "loss": r.loss,
                "wall_ms": r.wall_ms,
            }
            for r in result.trace.records
        )
    per_stage = (schedule.inner + 1) * schedule.copies
    table.extend(
        {"trial": "reference", "stage": t, "inner_iter": 0, "samples": t * per_stage, "dist": value}
        for t, value in reference_rate(schedule)
    )
    return table


def sensitivity_table(config: ExperimentConfig, results: dict[int, list[TrialResult]]) -> Table:
    table = Table(SENSITIVITY_COLUMNS)
    for p, trials in results.items():
        if not table.header and trials:
            table.header = schedule_header(trials[0].schedule, config, p_min=config.p_min, p_max=config.p_max)
        iterations = [samples_to_target(r, config.eps) for r in trials]
        finals = [r.trace.final.dist for r in trials]
        mean_iters, std_iters = mean_std(iterations)
        mean_final, std_final = mean_std(finals)
        table.rows.append(
            {
                "model": config.model,
                "p": p,
                "mean_iters": mean_iters,
                "std_iters": std_iters,
                "mean_final_dist": mean_final,
                "std_final_dist": std_final,
            }
        )
    return table


def identification_table(
    config: ExperimentConfig,
    instance: LogisticInstance,
    schedule: Schedule,
    paths: Sequence[IdentificationPath],
) -> Table:
    table = Table(
        IDENTIFICATION_COLUMNS,
        header=schedule_header(schedule, config, support_size=int(instance.support.size)),
    )
    for path in paths:
        table.extend(identification_rows(instance, path))
    return table
