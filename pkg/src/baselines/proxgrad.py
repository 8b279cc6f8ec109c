"""Stochastic proximal gradient with polynomially decaying stepsizes c * k^-p."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from problems import LogisticInstance
from prox_kit import LinearL1Model, QuadraticAnchor, Vector, linear_l1_prox

from .common import BaselineTrace, GradientFn, sample_gradient


def poly_stepsize(scale: float, power: float, k: int) -> float:
    return scale * k**-power


def poly_prox_gradient(
    gradient: GradientFn,
    start: Vector,
    tau: float,
    penalized: int,
    scale: float,
    power: float,
    indices: Sequence[int],
    every: int = 1,
) -> BaselineTrace:
    """z_{k+1} = prox of stepsize * tau ||w||_1 at z_k - stepsize * g_k, stepsize = scale * k^-power."""
    if not scale > 0.0:
        raise ValueError(f"stepsize scale must be positive, got {scale}")
    trace = BaselineTrace(every)
    point = np.array(start, dtype=float)
    trace.keep(0, 0.0, point)
    for k, index in enumerate(indices, start=1):
        stepsize = poly_stepsize(scale, power, k)
        model = LinearL1Model(0.0, gradient(point, int(index)), point, tau, penalized)
        point = linear_l1_prox(model, QuadraticAnchor(1.0 / stepsize, point))
        trace.keep(k, stepsize, point, last=k == len(indices))
    return trace


def prox_grad_poly(
    instance: LogisticInstance,
    scale: float,
    power: float,
    indices: Sequence[int],
    every: int = 1,
    start: Vector | None = None,
) -> BaselineTrace:
    """The polynomially decaying baseline on a logistic instance, started at zero by default."""
    start = np.zeros(instance.dimension + 1) if start is None else start
    return poly_prox_gradient(sample_gradient(instance), start, instance.tau, instance.dimension, scale, power, indices, every)
