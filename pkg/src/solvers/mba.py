"""The model-based inner loop and its geometric step decay restarts."""

from __future__ import annotations

import logging

import numpy as np

from prox_kit import QuadraticAnchor, Vector
from utils import RandomStreams

from .oracle import ModelOracle
from .trace import TraceRecorder

logger = logging.getLogger(__name__)


def _check(stepsize: float, inner: int) -> None:
    if not stepsize > 0.0:
        raise ValueError(f"stepsize must be positive, got {stepsize}")
    if inner < 0:
        raise ValueError(f"inner iteration count must be nonnegative, got {inner}")


def mba(
    oracle: ModelOracle,
    start: Vector,
    stepsize: float,
    inner: int,
    is_conv: bool = False,
    streams: RandomStreams | None = None,
    recorder: TraceRecorder | None = None,
    stage: int = 1,
    last_iterate: bool = False,
) -> Vector:
    """
    Runs inner + 1 anchored model steps y_{k+1} = argmin f_{y_k}(y, z_k) + ||y - y_k||^2 / (2 stepsize).

    Returns the average of y_1..y_{K+1} if is_conv, y_{K+1} if last_iterate,
    otherwise y_{K*} for K* uniform on {0, ..., K}.

    Args:
        oracle (ModelOracle): Measurement source and step solver.
        start (Vector): y_0.
        stepsize (float): alpha > 0.
        inner (int): K >= 0.
        streams (RandomStreams): Measurements come from `samples`, K* from `selection`.
        recorder (TraceRecorder): Optional; receives checkpoints labeled `stage`.
    """
    _check(stepsize, inner)
    streams = streams if streams is not None else RandomStreams(0)
    chosen = None if is_conv or last_iterate else int(streams.selection.integers(inner + 1))
    batch = oracle.draw(streams.samples, inner + 1)

    y = start
    selected = start
    total = np.zeros_like(start) if is_conv else None
    for k in range(inner + 1):
        if k == chosen:
            selected = y
        y = oracle.step(y, batch, k, QuadraticAnchor.compose(stepsize, y))
        if total is not None:
            total += y
        if recorder is not None:
            recorder.consume()
            if recorder.due(k, inner):
                recorder.record(stage, k + 1, y)

    if total is not None:
        output = total / (inner + 1)
    elif last_iterate:
        output = y
    else:
        output = selected
    if recorder is not None:
        recorder.record(stage, inner + 1, output)
    return output


def rmba(
    oracle: ModelOracle,
    start: Vector,
    stepsize: float,
    inner: int,
    stages: int,
    is_conv: bool = False,
    streams: RandomStreams | None = None,
    recorder: TraceRecorder | None = None,
    last_iterate: bool = False,
) -> Vector:
    """Restarted MBA: stage t runs mba from the previous output with stepsize 2^-t * stepsize."""
    _check(stepsize, inner)
    if stages < 1:
        raise ValueError(f"need at least one stage, got {stages}")
    streams = streams if streams is not None else RandomStreams(0)
    x = start
    for t in range(stages):
        alpha = stepsize * 2.0**-t
        if recorder is not None:
            recorder.begin_stage(t + 1, alpha)
        x = mba(oracle, x, alpha, inner, is_conv, streams, recorder, stage=t + 1, last_iterate=last_iterate)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("stage %d/%d alpha=%.3e dist=%.3e", t + 1, stages, alpha, oracle.distance(x))
    return x
