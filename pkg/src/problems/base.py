"""Shared problem plumbing: the sharpness profile, the problem interface the
solvers sample from, and random initialization."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Protocol

import numpy as np

from prox_kit import Vector

MODEL_TAGS = ("subgradient", "clipped", "proxlinear", "proxpoint", "proxgradient")


class UnknownModel(Exception):
    def __init__(self, problem_tag: str, model_tag: str):
        super().__init__(f"model '{model_tag}' is not available for problem '{problem_tag}'")


builders: dict[str, Callable[..., Any]] = {}


def register_builder(problem_tag: str) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
    """Registers the model builder of a problem family under `problem_tag`."""

    def register(builder: Callable[..., Any]) -> Callable[..., Any]:
        builders[problem_tag] = builder
        return builder

    return register


def build_model(problem_tag: str, model_tag: str, point: Vector, *measurement: Any):
    """The sampled model of one measurement of `problem_tag`, based at `point`."""
    if problem_tag not in builders:
        raise UnknownModel(problem_tag, model_tag)
    return builders[problem_tag](model_tag, point, *measurement)


@dataclass(frozen=True)
class SharpnessProfile:
    """Constants of the growth, accuracy and Lipschitz assumptions.

    mu: sharpness modulus. eta: one-sided accuracy modulus (0 for convex
    problems). lipschitz: second-moment Lipschitz bound. gamma: tube parameter.
    """

    mu: float
    eta: float
    lipschitz: float
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if not (self.mu > 0.0 and self.lipschitz > 0.0 and self.eta >= 0.0):
            raise ValueError(f"invalid constants mu={self.mu}, eta={self.eta}, L={self.lipschitz}")
        if self.lipschitz < self.mu:
            raise ValueError(f"Lipschitz bound {self.lipschitz} is below the sharpness modulus {self.mu}")
        if not 0.0 < self.gamma < 2.0:
            raise ValueError(f"tube parameter must lie in (0, 2), got {self.gamma}")

    @property
    def tube_radius(self) -> float:
        return math.inf if self.eta == 0.0 else self.gamma * self.mu / self.eta


class Batch(Protocol):
    """A block of measurements stored as parallel arrays."""

    def __len__(self) -> int: ...

    def take(self, indices: np.ndarray) -> Batch: ...


class Problem(ABC):
    """A stochastic problem the solvers can sample models from."""

    tag: str

    @property
    @abstractmethod
    def dimension(self) -> int: ...

    @property
    @abstractmethod
    def ground_truth(self) -> Vector: ...

    @abstractmethod
    def sample(self, rng: np.random.Generator, count: int) -> Batch:
        """Draws `count` fresh measurements."""

    def sample_pool(self, rng: np.random.Generator, count: int) -> Batch:
        """Draws the fixed measurement pool of a finite-sample run."""
        return self.sample(rng, count)

    @abstractmethod
    def model(self, model_tag: str, point: Vector, batch: Any, index: int):
        """The prox_kit model of measurement `index` of `batch`, based at `point`."""

    @abstractmethod
    def losses(self, point: Vector, batch: Any) -> np.ndarray:
        """Per-measurement loss f(point, z)."""

    @abstractmethod
    def distance(self, point: Vector) -> float:
        """Distance to the target set."""

    def project(self, point: Vector) -> Vector:
        """Projection onto the feasible set (the whole space unless overridden)."""
        return point


def corruption_mask(rng: np.random.Generator, count: int, p_fail: float, exact: bool = False) -> np.ndarray:
    """Which of `count` measurements are outliers.

    Each one independently with probability p_fail, or with `exact` a set of
    round(p_fail * count) indices drawn without replacement.
    """
    if not exact:
        return rng.random(count) < p_fail
    mask = np.zeros(count, dtype=bool)
    mask[rng.choice(count, size=round(p_fail * count), replace=False)] = True
    return mask


def random_direction(rng: np.random.Generator, dimension: int) -> Vector:
    """Uniform on the unit sphere."""
    v = rng.standard_normal(dimension)
    return v / np.linalg.norm(v)


def random_init(problem: Problem, radius: float, rng: np.random.Generator) -> Vector:
    """Ground truth plus `radius` times a uniformly random unit direction."""
    if radius < 0.0:
        raise ValueError(f"initial radius must be nonnegative, got {radius}")
    return problem.ground_truth + radius * random_direction(rng, problem.dimension)
