"""Proximally regularized MBA, its ensemble and the restarted ensemble scheme."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from prox_kit import QuadraticAnchor, Vector
from utils import RandomStreams, Signal

from .mba import _check
from .oracle import ModelOracle
from .trace import TraceRecorder

logger = logging.getLogger(__name__)

ensemble_failed: Signal[int] = Signal()


class NoMajority(Exception):
    def __init__(self, counts: np.ndarray, tolerance: float):
        self.counts = counts
        super().__init__(
            f"no point has more than {counts.size / 2:g} of {counts.size} points within {2.0 * tolerance:g}"
            f" (best {int(counts.max())})"
        )


def pmba(
    oracle: ModelOracle,
    start: Vector,
    weight: float,
    stepsize: float,
    inner: int,
    streams: RandomStreams | None = None,
    recorder: TraceRecorder | None = None,
) -> Vector:
    """MBA steps with the extra proximal term (weight/2)||y - y_0||^2; returns y_{K*}."""
    _check(stepsize, inner)
    if not weight > 0.0:
        raise ValueError(f"proximal weight must be positive, got {weight}")
    streams = streams if streams is not None else RandomStreams(0)
    chosen = int(streams.selection.integers(inner + 1))
    batch = oracle.draw(streams.samples, inner + 1)

    y = selected = start
    for k in range(inner + 1):
        if k == chosen:
            selected = y
        y = oracle.step(y, batch, k, QuadraticAnchor.compose(stepsize, y, weight, start))
        if recorder is not None:
            recorder.consume()
    return selected


def neighbor_counts(points: np.ndarray, tolerance: float) -> np.ndarray:
    """Number of points in the closed 2*tolerance ball around each point (itself included)."""
    return (cdist(points, points) <= 2.0 * tolerance).sum(axis=1)


def ensemble_select(points: Sequence[Vector] | np.ndarray, tolerance: float) -> int:
    """First index whose closed 2*tolerance ball holds strictly more than half of the points."""
    if not tolerance > 0.0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    stacked = np.asarray(points, dtype=float)
    if stacked.ndim == 1:
        stacked = stacked[:, None]
    if stacked.shape[0] < 1:
        raise ValueError("need at least one point")
    counts = neighbor_counts(stacked, tolerance)
    majority = np.flatnonzero(2 * counts > counts.size)
    if majority.size == 0:
        raise NoMajority(counts, tolerance)
    return int(majority[0])


def epmba(
    oracle: ModelOracle,
    start: Vector,
    weight: float,
    stepsize: float,
    inner: int,
    copies: int,
    tolerance: float,
    streams: RandomStreams | None = None,
    recorder: TraceRecorder | None = None,
    stage: int = 1,
) -> Vector:
    """
    Runs `copies` independent pmba trials from `start` and returns the majority point.

    Copy j draws from streams.spawn(j). Without a majority the point with the
    most neighbors is returned, the stage is flagged on the recorder and
    `ensemble_failed` is emitted with the stage index.
    """
    if copies < 1:
        raise ValueError(f"need at least one copy, got {copies}")
    streams = streams if streams is not None else RandomStreams(0)
    points = np.stack(
        [pmba(oracle, start, weight, stepsize, inner, streams.spawn(j), recorder) for j in range(copies)]
    )
    try:
        return points[ensemble_select(points, tolerance)]
    except NoMajority as e:
        logger.warning("stage %d: %s; keeping the best-supported point", stage, e)
        if recorder is not None:
            recorder.flag(stage)
        ensemble_failed.emit(stage)
        return points[int(np.argmax(e.counts))]


def rpmba(
    oracle: ModelOracle,
    start: Vector,
    weight: float,
    stepsize: float,
    inner: int,
    tolerance: float,
    copies: int,
    stages: int,
    streams: RandomStreams | None = None,
    recorder: TraceRecorder | None = None,
) -> Vector:
    """Restarted ensemble scheme: stage t uses (2^t weight, 2^-t stepsize, 2^-t tolerance). Returns x_T."""
    if stages < 1:
        raise ValueError(f"need at least one stage, got {stages}")
    streams = streams if streams is not None else RandomStreams(0)
    x = start
    for t in range(stages):
        rho, alpha, eps = weight * 2.0**t, stepsize * 2.0**-t, tolerance * 2.0**-t
        if recorder is not None:
            recorder.begin_stage(t + 1, alpha, rho, eps)
        x = epmba(oracle, x, rho, alpha, inner, copies, eps, streams.spawn(t), recorder, stage=t + 1)
        if recorder is not None:
            recorder.record(t + 1, inner + 1, x)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("stage %d/%d rho=%.3e alpha=%.3e dist=%.3e", t + 1, stages, rho, alpha, oracle.distance(x))
    return x
