from __future__ import annotations

import numpy as np

from problems import MODEL_TAGS, Problem, UnknownModel
from problems.base import Batch
from prox_kit import QuadraticAnchor, Vector, solve_anchored


class ModelOracle:
    """
    Samples measurements of a problem and solves its anchored model steps.

    In streaming mode every draw is a fresh measurement. In finite mode a pool
    of measurements is drawn once and steps resample it uniformly with
    replacement.

    Attributes:
        problem (Problem): The problem being solved.
        model_tag (str): Which sampled model the steps minimize.
        pool (Batch | None): The fixed measurement pool of finite mode.
    """

    def __init__(self, problem: Problem, model_tag: str, pool: Batch | None = None):
        if model_tag not in MODEL_TAGS:
            raise UnknownModel(problem.tag, model_tag)
        self.problem = problem
        self.model_tag = model_tag
        self.pool = pool

    def __repr__(self) -> str:
        mode = "streaming" if self.pool is None else f"finite({len(self.pool)})"
        return f"ModelOracle({self.problem.tag}, {self.model_tag}, {mode})"

    @classmethod
    def finite(cls, problem: Problem, model_tag: str, size: int, rng: np.random.Generator) -> ModelOracle:
        if size < 1:
            raise ValueError(f"measurement pool must be nonempty, got {size}")
        return cls(problem, model_tag, problem.sample_pool(rng, size))

    def draw(self, rng: np.random.Generator, count: int) -> Batch:
        """The next `count` measurements of the step sequence."""
        if self.pool is None:
            return self.problem.sample(rng, count)
        return self.pool.take(rng.integers(len(self.pool), size=count))

    def step(self, point: Vector, batch: Batch, index: int, anchor: QuadraticAnchor) -> Vector:
        """argmin over the feasible set of model(u) + anchor(u), by solving then projecting."""
        model = self.problem.model(self.model_tag, point, batch, index)
        return self.problem.project(solve_anchored(model, anchor))

    def distance(self, point: Vector) -> float:
        return self.problem.distance(point)
