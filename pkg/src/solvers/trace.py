"""Convergence traces: checkpoint records and per-stage parameters of one run."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

import settings
from problems import Problem
from problems.base import Batch
from prox_kit import Vector
from utils import Signal


@dataclass(frozen=True)
class ConvergenceRecord:
    trial: int
    stage: int
    inner_iter: int
    samples: int
    dist: float
    loss: float
    wall_ms: float


@dataclass
class StageRecord:
    stage: int
    stepsize: float
    weight: float | None = None
    tolerance: float | None = None
    failed: bool = False


@dataclass
class ConvergenceTrace:
    trial: int = 0
    records: list[ConvergenceRecord] = field(default_factory=list)
    stages: list[StageRecord] = field(default_factory=list)
    points: list[Vector] = field(default_factory=list)

    @property
    def final(self) -> ConvergenceRecord:
        return self.records[-1]

    def stage_ends(self) -> list[ConvergenceRecord]:
        """The last record of every stage, in stage order."""
        ends: dict[int, ConvergenceRecord] = {}
        for record in self.records:
            if record.stage > 0:
                ends[record.stage] = record
        return [ends[stage] for stage in sorted(ends)]

    def samples_to(self, target: float) -> int | None:
        """Samples consumed when the distance first reached `target`."""
        for record in self.records:
            if record.dist <= target:
                return record.samples
        return None

    @property
    def failed_stages(self) -> list[int]:
        return [s.stage for s in self.stages if s.failed]


class TraceRecorder:
    """
    Counts consumed samples and records checkpoints of a running solver.

    Every record is also emitted on `recorded`, so the harness can stream
    progress while the trace fills.

    Attributes:
        trace (ConvergenceTrace): The records collected so far.
        samples (int): Measurement draws consumed so far.
        checkpoints (int): Records per stage, at cadence ceil(K / checkpoints).
        keep_points (bool): Also store the recorded points on the trace.
    """

    def __init__(
        self,
        problem: Problem,
        evaluation: Batch | None = None,
        checkpoints: int = settings.CHECKPOINTS_PER_STAGE,
        trial: int = 0,
        keep_points: bool = False,
    ):
        if checkpoints < 1:
            raise ValueError(f"need at least one checkpoint per stage, got {checkpoints}")
        self.problem = problem
        self.evaluation = evaluation
        self.checkpoints = checkpoints
        self.trace = ConvergenceTrace(trial)
        self.samples = 0
        self.keep_points = keep_points
        self.recorded: Signal[ConvergenceRecord] = Signal()
        self._start = time.perf_counter()

    def cadence(self, inner: int) -> int:
        return max(1, math.ceil(inner / self.checkpoints))

    def due(self, k: int, inner: int) -> bool:
        """True if the iterate after step k is a checkpoint (stage ends are recorded separately)."""
        return k < inner and (k + 1) % self.cadence(inner) == 0

    def consume(self, count: int = 1) -> None:
        self.samples += count

    def begin_stage(
        self,
        stage: int,
        stepsize: float,
        weight: float | None = None,
        tolerance: float | None = None,
    ) -> None:
        self.trace.stages.append(StageRecord(stage, stepsize, weight, tolerance))

    def flag(self, stage: int) -> None:
        for record in self.trace.stages:
            if record.stage == stage:
                record.failed = True

    def loss(self, point: Vector) -> float:
        if self.evaluation is None:
            return math.nan
        return float(np.mean(self.problem.losses(point, self.evaluation)))

    def record(self, stage: int, inner_iter: int, point: Vector) -> ConvergenceRecord:
        record = ConvergenceRecord(
            trial=self.trace.trial,
            stage=stage,
            inner_iter=inner_iter,
            samples=self.samples,
            dist=self.problem.distance(point),
            loss=self.loss(point),
            wall_ms=(time.perf_counter() - self._start) * 1000.0,
        )
        self.trace.records.append(record)
        if self.keep_points:
            self.trace.points.append(point.copy())
        self.recorded.emit(record)
        return record
