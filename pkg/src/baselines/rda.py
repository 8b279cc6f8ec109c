"""Regularized dual averaging for l1-penalized losses.

At step t the iterate minimizes
<g_bar, z> + tau ||w||_1 + (gamma / (2 sqrt(t))) ||z||^2 over z = (w, b),
with g_bar the mean of the first t sampled gradients.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from problems import LogisticInstance
from prox_kit import Vector, soft_threshold

from .common import BaselineTrace, GradientFn, sample_gradient


@dataclass(frozen=True)
class RdaState:
    """
    Attributes:
        average (Vector): running mean of the sampled gradients (weights first, intercept last).
        step (int): number of gradients averaged.
        gamma (float): RDA regularization parameter.
        tau (float): l1 weight on the first `penalized` coordinates.
    """

    average: Vector
    step: int
    gamma: float
    tau: float
    penalized: int

    def __post_init__(self) -> None:
        if not (self.gamma > 0.0 and self.tau >= 0.0 and self.step >= 0):
            raise ValueError(f"invalid RDA state gamma={self.gamma}, tau={self.tau}, t={self.step}")

    @classmethod
    def initial(cls, dimension: int, gamma: float, tau: float, penalized: int | None = None) -> RdaState:
        return cls(np.zeros(dimension), 0, gamma, tau, dimension - 1 if penalized is None else penalized)

    def iterate(self) -> Vector:
        """The minimizer of the averaged subproblem; zero before the first step."""
        if self.step == 0:
            return np.zeros_like(self.average)
        scale = -math.sqrt(self.step) / self.gamma
        point = scale * self.average
        n = self.penalized
        point[:n] = scale * soft_threshold(self.average[:n], self.tau)
        return point


def rda_step(state: RdaState, gradient: Vector) -> tuple[RdaState, Vector]:
    step = state.step + 1
    average = state.average + (gradient - state.average) / step
    updated = dataclasses.replace(state, average=average, step=step)
    return updated, updated.iterate()


def rda_path(
    gradient: GradientFn,
    state: RdaState,
    indices: Sequence[int],
    every: int = 1,
) -> BaselineTrace:
    """Runs RDA over the sample sequence; the trace starts with the zero iterate."""
    trace = BaselineTrace(every)
    point = state.iterate()
    trace.keep(0, state.gamma, point)
    for t, index in enumerate(indices, start=1):
        state, point = rda_step(state, gradient(point, int(index)))
        trace.keep(t, state.gamma, point, last=t == len(indices))
    return trace


def run_rda(
    instance: LogisticInstance,
    gamma: float,
    indices: Sequence[int],
    every: int = 1,
) -> BaselineTrace:
    """RDA on a logistic instance, started at (w, b) = 0."""
    state = RdaState.initial(instance.dimension + 1, gamma, instance.tau)
    return rda_path(sample_gradient(instance), state, indices, every)
