from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from problems import LogisticInstance, draw_indices, logistic_gradient
from prox_kit import Vector

GradientFn = Callable[[Vector, int], Vector]


@dataclass
class BaselineTrace:
    """Iterates kept every `every` steps, with the stepsize (or RDA weight) used at that step."""

    every: int = 1
    iterations: list[int] = field(default_factory=list)
    stepsizes: list[float] = field(default_factory=list)
    points: list[Vector] = field(default_factory=list)

    def keep(self, iteration: int, stepsize: float, point: Vector, last: bool = False) -> None:
        if last or iteration % self.every == 0:
            self.iterations.append(iteration)
            self.stepsizes.append(stepsize)
            self.points.append(point)

    @property
    def final(self) -> Vector:
        return self.points[-1]


def index_stream(instance: LogisticInstance, rng: np.random.Generator, iterations: int, block: int) -> np.ndarray:
    """Sample indices drawn in blocks of `block`, matching the solvers' draw pattern."""
    if block < 1:
        raise ValueError(f"block size must be positive, got {block}")
    blocks = [draw_indices(instance, rng, block) for _ in range(-(-iterations // block))]
    return np.concatenate(blocks)[:iterations] if blocks else np.empty(0, dtype=int)


def sample_gradient(instance: LogisticInstance) -> GradientFn:
    """Gradient of the logistic loss of sample i at a point."""

    def gradient(point: Vector, index: int) -> Vector:
        return logistic_gradient(point, instance.features[index][None, :], instance.labels[index : index + 1])

    return gradient
