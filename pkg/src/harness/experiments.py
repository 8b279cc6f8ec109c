"""Seeded multi-trial experiments: convergence, stepsize sensitivity and activity identification."""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, TypeVar

import numpy as np

import settings
from baselines import BaselineTrace, index_stream, prox_grad_poly, run_rda
from problems import (
    BlindDeconvolution,
    BlindInstance,
    LogisticInstance,
    LogisticRegression,
    PhaseInstance,
    PhaseRetrieval,
    Problem,
    SharpnessProfile,
    dist_support,
    dist_to_reference,
    estimate_constants,
    idx_instance,
    logistic_objective,
    random_init,
    solve_reference,
    synth_logistic,
)
from prox_kit import Vector
from solvers import ConvergenceRecord, ConvergenceTrace, ModelOracle, Schedule, TraceRecorder, rmba, rpmba, schedule_for
from utils import RandomStreams

from .config import ExperimentConfig

logger = logging.getLogger(__name__)

ResultType = TypeVar("ResultType")


@dataclass
class TrialResult:
    trial: int
    schedule: Schedule
    trace: ConvergenceTrace


@dataclass
class IdentificationPath:
    """Recorded iterates of one method on the identification instance."""

    method: str
    iterations: list[int]
    points: list[Vector]


def trial_streams(config: ExperimentConfig, trial: int) -> RandomStreams:
    return RandomStreams(config.seed, (trial,))


def build_instance(config: ExperimentConfig, rng: np.random.Generator):
    if config.problem == "phase":
        return PhaseInstance.random(config.d, config.p_fail, rng, noise_scale=config.noise_scale)
    if config.problem == "blind":
        return BlindInstance.random(
            config.dimensions, config.p_fail, rng, noise_scale=config.noise_scale, radius=config.radius
        )
    if config.idx_images is not None:
        instance = idx_instance(config.idx_images, config.idx_labels, config.tau, config.digits)
        return instance.with_reference(solve_reference(instance))
    return synth_logistic(config.d, config.n_samples, config.sparsity, config.tau, rng)


def build_problem(config: ExperimentConfig, instance) -> Problem:
    if isinstance(instance, PhaseInstance):
        return PhaseRetrieval(instance)
    if isinstance(instance, BlindInstance):
        return BlindDeconvolution(instance)
    return LogisticRegression(instance)


def schedule_kind(config: ExperimentConfig) -> str:
    if config.schedule is not None:
        return config.schedule
    return "highprob" if config.algorithm == "rpmba" else "nonconvex"


def resolve_schedule(config: ExperimentConfig, profile: SharpnessProfile, radius: float) -> Schedule:
    """The schedule for the config's algorithm, reduced by the desk-scale caps."""
    failure = config.delta_prime if config.algorithm == "rpmba" else config.delta2
    schedule = schedule_for(schedule_kind(config), profile, radius, config.eps, failure, config.enforce_tube)
    schedule = schedule.capped(config.inner_cap, config.stages)
    if config.copies is not None:
        schedule = dataclasses.replace(schedule, copies=config.copies)
    return schedule


def constants_for(
    config: ExperimentConfig, instance, streams: RandomStreams, sharpness_exponent: float | None = None
) -> SharpnessProfile:
    return estimate_constants(
        config.problem,
        instance,
        config.mc_samples,
        streams.generator("constants"),
        gamma=config.gamma,
        sharpness_exponent=config.sharpness_exponent if sharpness_exponent is None else sharpness_exponent,
    )


def initial_radius(config: ExperimentConfig, problem: Problem) -> float:
    """R0: the configured radius, else the start-to-reference distance on logistic runs."""
    if config.r0 is not None:
        return config.r0
    if config.problem == "logistic":
        return float(np.linalg.norm(problem.ground_truth - _logistic_start(config, problem)))
    return settings.R0


def plan(config: ExperimentConfig) -> Schedule:
    """Resolves the schedule of trial 0, raising ScheduleRejected before any trial runs."""
    streams = trial_streams(config, 0)
    instance = build_instance(config, streams.generator("instance"))
    radius = initial_radius(config, build_problem(config, instance))
    return resolve_schedule(config, constants_for(config, instance, streams), radius)


def _logistic_start(config: ExperimentConfig, problem: Problem) -> Vector:
    if config.init == "reference":
        return problem.ground_truth.copy()
    return np.zeros(problem.dimension)


def _start_point(config: ExperimentConfig, problem: Problem, streams: RandomStreams, radius: float) -> Vector:
    if config.problem == "logistic":
        return _logistic_start(config, problem)
    return random_init(problem, radius, streams.generator("init"))


def _log_progress(record: ConvergenceRecord) -> None:
    logger.debug("trial %d stage %d: %d samples, dist %.3e", record.trial, record.stage, record.samples, record.dist)


def run_trial(config: ExperimentConfig, trial: int) -> TrialResult:
    """One seeded run of the config's algorithm; a pure function of (config, trial)."""
    streams = trial_streams(config, trial)
    instance = build_instance(config, streams.generator("instance"))
    problem = build_problem(config, instance)
    radius = initial_radius(config, problem)
    schedule = resolve_schedule(config, constants_for(config, instance, streams), radius)

    if config.mode == "finite":
        oracle = ModelOracle.finite(problem, config.model, config.pool_size, streams.generator("pool"))
    else:
        oracle = ModelOracle(problem, config.model)
    evaluation = problem.sample(streams.generator("eval"), settings.EVALUATION_BATCH)
    recorder = TraceRecorder(problem, evaluation, config.checkpoints, trial)
    recorder.recorded.connect(_log_progress)

    start = _start_point(config, problem, streams, radius)
    recorder.record(0, 0, start)
    stepsize = schedule.stepsize * 2.0**config.exponent
    if config.algorithm == "rpmba":
        final = rpmba(
            oracle,
            start,
            schedule.weight,
            stepsize,
            schedule.inner,
            schedule.tolerance,
            schedule.copies,
            schedule.stages,
            streams,
            recorder,
        )
    else:
        final = rmba(
            oracle,
            start,
            stepsize,
            schedule.inner,
            schedule.stages,
            is_conv=config.inner_output == "average",
            streams=streams,
            recorder=recorder,
            last_iterate=config.inner_output == "last",
        )
    logger.info(
        "trial %d: dist %.3e after %d samples (%d stages)",
        trial,
        problem.distance(final),
        recorder.samples,
        schedule.stages,
    )
    return TrialResult(trial, schedule, recorder.trace)


def _baseline_trial(config: ExperimentConfig, trial: int) -> TrialResult:
    """Runs RDA or the polynomial baseline and reports it in the convergence layout."""
    streams = trial_streams(config, trial)
    instance = build_instance(config, streams.generator("instance"))
    problem = build_problem(config, instance)
    schedule = resolve_schedule(config, constants_for(config, instance, streams), initial_radius(config, problem))
    indices = baseline_indices(instance, schedule, streams.samples)
    if config.algorithm == "rda":
        path = best_rda_path(config, instance, indices)
    else:
        (path,) = poly_paths(config, config.poly_exponents[:1], instance, indices)

    trace = ConvergenceTrace(trial)
    for iteration, point in zip(path.iterations, path.points):
        trace.records.append(
            ConvergenceRecord(
                trial, 0, iteration, iteration, problem.distance(point), logistic_objective(point, instance), 0.0
            )
        )
    return TrialResult(trial, schedule, trace)


def map_trials(
    function: Callable[[ExperimentConfig, int], ResultType],
    config: ExperimentConfig,
    trials: Iterable[int],
) -> list[ResultType]:
    """Runs trials serially or on a process pool; results come back in trial order."""
    trials = list(trials)
    if config.workers <= 1 or len(trials) <= 1:
        return [function(config, trial) for trial in trials]
    with ProcessPoolExecutor(max_workers=min(config.workers, len(trials))) as pool:
        return list(pool.map(function, [config] * len(trials), trials))


def run_convergence_trials(config: ExperimentConfig) -> list[TrialResult]:
    plan(config)
    function = _baseline_trial if config.algorithm in ("rda", "proxgrad-poly") else run_trial
    return map_trials(function, config, range(config.trials))


def baseline_indices(instance: LogisticInstance, schedule: Schedule, rng: np.random.Generator) -> np.ndarray:
    """The index sequence RMBA consumes under `schedule`: T blocks of K + 1 draws."""
    block = schedule.inner + 1
    return index_stream(instance, rng, schedule.stages * block, block)


def best_rda_path(
    config: ExperimentConfig,
    instance: LogisticInstance,
    indices: np.ndarray,
    every: int = 1,
) -> IdentificationPath:
    """RDA with the gamma of the grid that ends at the lowest objective."""
    best: tuple[float, float, BaselineTrace] | None = None
    for gamma in config.rda_gammas:
        trace = run_rda(instance, gamma, indices, every)
        value = logistic_objective(trace.final, instance)
        if best is None or value < best[0]:
            best = (value, gamma, trace)
    if best is None:
        raise ValueError("empty RDA parameter grid")
    logger.info("RDA gamma %.3g selected (final objective %.6e)", best[1], best[0])
    return IdentificationPath("rda", best[2].iterations, best[2].points)


def poly_paths(
    config: ExperimentConfig,
    powers: Iterable[float],
    instance: LogisticInstance,
    indices: np.ndarray,
    every: int = 1,
    start: Vector | None = None,
) -> list[IdentificationPath]:
    paths = []
    for power in powers:
        trace = prox_grad_poly(instance, config.poly_scale, power, indices, every, start)
        paths.append(IdentificationPath(f"proxgrad-p{power:.4g}", trace.iterations, trace.points))
    return paths


def sharpness_schedules(
    config: ExperimentConfig, instance: LogisticInstance, streams: RandomStreams, radius: float
) -> list[tuple[Schedule, float]]:
    """One (schedule, exponent) per distinct run over the mu grid; later exponents that
    cap to the same (T, K, alpha_0) are dropped."""
    exponents = config.sharpness_grid or (config.sharpness_exponent,)
    schedules: dict[tuple[int, int, float], tuple[Schedule, float]] = {}
    for exponent in exponents:
        schedule = resolve_schedule(config, constants_for(config, instance, streams, exponent), radius)
        schedules.setdefault((schedule.stages, schedule.inner, schedule.stepsize), (schedule, exponent))
    return list(schedules.values())


def _rmba_path(
    config: ExperimentConfig, problem: LogisticRegression, schedule: Schedule, start: Vector
) -> tuple[IdentificationPath, int]:
    recorder = TraceRecorder(problem, None, config.checkpoints, keep_points=True)
    recorder.record(0, 0, start)
    rmba(
        ModelOracle(problem, config.model),
        start,
        schedule.stepsize * 2.0**config.exponent,
        schedule.inner,
        schedule.stages,
        is_conv=config.inner_output == "average",
        streams=trial_streams(config, 0),
        recorder=recorder,
        last_iterate=config.inner_output == "last",
    )
    records = recorder.trace.records
    path = IdentificationPath("rmba", [r.samples for r in records], recorder.trace.points)
    return path, recorder.cadence(schedule.inner)


def identification_paths(config: ExperimentConfig) -> tuple[LogisticInstance, Schedule, list[IdentificationPath]]:
    """RMBA with the proximal-gradient model against the baselines on one seeded instance.

    RMBA runs once per distinct schedule of the sharpness grid and the run that ends at
    the lowest objective is kept; the baselines replay the indices that run consumed.
    """
    if config.problem != "logistic":
        raise ValueError("activity identification runs on the logistic problem")
    streams = trial_streams(config, 0)
    instance = build_instance(config, streams.generator("instance"))
    problem = build_problem(config, instance)
    radius = initial_radius(config, problem)
    start = _start_point(config, problem, streams, radius)

    best: tuple[float, Schedule, IdentificationPath, int] | None = None
    for schedule, exponent in sharpness_schedules(config, instance, streams, radius):
        path, every = _rmba_path(config, problem, schedule, start)
        value = logistic_objective(path.points[-1], instance)
        logger.info("mu exponent %.3g: K=%d, final objective %.6e", exponent, schedule.inner, value)
        if best is None or value < best[0]:
            best = (value, schedule, path, every)
    _, schedule, rmba_path, every = best

    # fresh streams replay the index sequence the solver consumed
    baseline_start = start if config.init == "reference" else None
    indices = baseline_indices(instance, schedule, trial_streams(config, 0).samples)
    paths = [rmba_path, best_rda_path(config, instance, indices, every)]
    paths += poly_paths(config, config.poly_exponents, instance, indices, every, baseline_start)
    return instance, schedule, paths


def identification_rows(instance: LogisticInstance, path: IdentificationPath) -> list[dict]:
    reference_value = logistic_objective(instance.reference, instance)
    return [
        {
            "method": path.method,
            "iter": iteration,
            "fval_gap": logistic_objective(point, instance) - reference_value,
            "dist_support": dist_support(point, instance),
            "dist_to_reference": dist_to_reference(point, instance),
        }
        for iteration, point in zip(path.iterations, path.points)
    ]


def reference_rate(schedule: Schedule) -> list[tuple[int, float]]:
    """(stage, 2^-t R0) for t = 0..T."""
    return [(t, schedule.radius * 2.0**-t) for t in range(schedule.stages + 1)]


def sensitivity_exponents(config: ExperimentConfig) -> range:
    return range(config.p_min, config.p_max + 1)


def sensitivity_trials(config: ExperimentConfig) -> dict[int, list[TrialResult]]:
    """Runs `sensitivity_trials` seeded trials for every stepsize exponent p."""
    plan(config)
    results = {}
    for p in sensitivity_exponents(config):
        scaled = config.with_overrides(exponent=p, trials=config.sensitivity_trials)
        results[p] = map_trials(run_trial, scaled, range(scaled.trials))
        logger.info("stepsize scale 2^%d: %d trials done", p, len(results[p]))
    return results


def samples_to_target(result: TrialResult, target: float) -> float:
    """Samples until dist <= target, capped at the sample bound and the run's budget."""
    cap = min(result.schedule.sample_bound, float(result.trace.final.samples))
    reached = result.trace.samples_to(target)
    return cap if reached is None else min(float(reached), cap)
