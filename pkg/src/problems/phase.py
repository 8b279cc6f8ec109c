"""Robust phase retrieval: b = (a^T x)^2 + u * xi with gross outliers u * xi."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

import settings
from prox_kit import AffineAbsModel, ClippedAffineModel, LinearModel, QuadraticAbsModel, Vector

from .base import Problem, UnknownModel, build_model, corruption_mask, random_direction, register_builder

TAG = "phase"


@dataclass(frozen=True, eq=False)
class PhaseInstance:
    signal: Vector
    p_fail: float = 0.0
    noise_scale: float = math.sqrt(settings.NOISE_VARIANCE)
    law: str = "gaussian"

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_fail < 0.5:
            raise ValueError(f"p_fail must lie in [0, 1/2), got {self.p_fail}")
        if not np.linalg.norm(self.signal) > 0.0:
            raise ValueError("signal must be nonzero")
        if self.law != "gaussian":
            raise ValueError(f"unsupported measurement law '{self.law}'")

    @classmethod
    def random(cls, dimension: int, p_fail: float, rng: np.random.Generator, **kwargs) -> PhaseInstance:
        """A unit-norm signal drawn uniformly from the sphere."""
        return cls(random_direction(rng, dimension), p_fail, **kwargs)

    @property
    def dimension(self) -> int:
        return self.signal.size


@dataclass(frozen=True, eq=False)
class PhaseBatch:
    """Measurements as rows: directions (n, d), targets (n,), corruption flags (n,)."""

    directions: np.ndarray
    targets: np.ndarray
    corrupted: np.ndarray

    def __len__(self) -> int:
        return self.targets.size

    def take(self, indices: np.ndarray) -> PhaseBatch:
        return PhaseBatch(self.directions[indices], self.targets[indices], self.corrupted[indices])


def sample_phase(
    instance: PhaseInstance, rng: np.random.Generator, count: int = 1, exact_fraction: bool = False
) -> PhaseBatch:
    """Draws `count` measurements a ~ N(0, I), b = (a^T x)^2 + u |g|, g ~ N(0, sigma^2).

    With `exact_fraction` exactly round(p_fail * count) of them are corrupted.
    """
    directions = rng.standard_normal((count, instance.dimension))
    corrupted = corruption_mask(rng, count, instance.p_fail, exact_fraction)
    noise = np.abs(rng.normal(0.0, instance.noise_scale, count))
    clean = (directions @ instance.signal) ** 2
    return PhaseBatch(directions, clean + np.where(corrupted, noise, 0.0), corrupted)


@register_builder(TAG)
def phase_model(model_tag: str, point: Vector, direction: Vector, target: float):
    """The sampled model of |(a^T x)^2 - b| based at `point`."""
    if model_tag == "proxpoint":
        return QuadraticAbsModel(direction, float(target))

    inner = float(direction @ point)
    residual = inner * inner - float(target)
    slope = (2.0 * inner) * direction
    if model_tag == "proxlinear":
        return AffineAbsModel(residual, slope, point)

    sign = float(np.sign(residual))
    if model_tag == "subgradient":
        return LinearModel(abs(residual), sign * slope, point)
    if model_tag == "clipped":
        return ClippedAffineModel(AffineAbsModel(abs(residual), sign * slope, point), 0.0)
    raise UnknownModel(TAG, model_tag)


def phase_losses(point: Vector, batch: PhaseBatch) -> np.ndarray:
    return np.abs((batch.directions @ point) ** 2 - batch.targets)


def dist_phase(point: Vector, instance: PhaseInstance) -> float:
    """Distance to {signal, -signal}."""
    return float(min(np.linalg.norm(point - instance.signal), np.linalg.norm(point + instance.signal)))


class PhaseRetrieval(Problem):
    tag = TAG

    def __init__(self, instance: PhaseInstance):
        self.instance = instance

    @property
    def dimension(self) -> int:
        return self.instance.dimension

    @property
    def ground_truth(self) -> Vector:
        return self.instance.signal

    def sample(self, rng: np.random.Generator, count: int) -> PhaseBatch:
        return sample_phase(self.instance, rng, count)

    def sample_pool(self, rng: np.random.Generator, count: int) -> PhaseBatch:
        return sample_phase(self.instance, rng, count, exact_fraction=True)

    def model(self, model_tag: str, point: Vector, batch: PhaseBatch, index: int):
        return build_model(TAG, model_tag, point, batch.directions[index], batch.targets[index])

    def losses(self, point: Vector, batch: PhaseBatch) -> np.ndarray:
        return phase_losses(point, batch)

    def distance(self, point: Vector) -> float:
        return dist_phase(point, self.instance)
