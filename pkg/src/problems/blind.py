"""Robust blind deconvolution: b = <l, x><r, y> + u * xi over the stacked point (x, y)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

import settings
from prox_kit import AffineAbsModel, BilinearAbsModel, ClippedAffineModel, LinearModel, Vector, real_roots

from .base import Problem, UnknownModel, build_model, corruption_mask, random_direction, register_builder

TAG = "blind"


@dataclass(frozen=True, eq=False)
class BlindInstance:
    left_signal: Vector
    right_signal: Vector
    p_fail: float = 0.0
    noise_scale: float = math.sqrt(settings.NOISE_VARIANCE)
    radius: float = settings.BLIND_RADIUS

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_fail < 0.5:
            raise ValueError(f"p_fail must lie in [0, 1/2), got {self.p_fail}")
        if not self.radius > 1.0:
            raise ValueError(f"constraint radius must exceed 1, got {self.radius}")
        left, right = np.linalg.norm(self.left_signal), np.linalg.norm(self.right_signal)
        if not (left > 0.0 and math.isclose(left, right, rel_tol=1e-12)):
            raise ValueError(f"signals must be nonzero with equal norms, got {left} and {right}")

    @classmethod
    def random(cls, dimensions: tuple[int, int], p_fail: float, rng: np.random.Generator, **kwargs) -> BlindInstance:
        left, right = dimensions
        return cls(random_direction(rng, left), random_direction(rng, right), p_fail, **kwargs)

    @property
    def dimensions(self) -> tuple[int, int]:
        return self.left_signal.size, self.right_signal.size

    @property
    def scale(self) -> float:
        """D = ||x_bar|| ||y_bar||."""
        return float(np.linalg.norm(self.left_signal) * np.linalg.norm(self.right_signal))


@dataclass(frozen=True, eq=False)
class BlindBatch:
    lefts: np.ndarray
    rights: np.ndarray
    targets: np.ndarray
    corrupted: np.ndarray

    def __len__(self) -> int:
        return self.targets.size

    def take(self, indices: np.ndarray) -> BlindBatch:
        return BlindBatch(self.lefts[indices], self.rights[indices], self.targets[indices], self.corrupted[indices])


def sample_blind(
    instance: BlindInstance, rng: np.random.Generator, count: int = 1, exact_fraction: bool = False
) -> BlindBatch:
    """Draws l ~ N(0, I), r ~ N(0, I), b = <l, x><r, y> + u xi with xi ~ N(0, sigma^2).

    With `exact_fraction` exactly round(p_fail * count) of them are corrupted.
    """
    d1, d2 = instance.dimensions
    lefts = rng.standard_normal((count, d1))
    rights = rng.standard_normal((count, d2))
    corrupted = corruption_mask(rng, count, instance.p_fail, exact_fraction)
    noise = rng.normal(0.0, instance.noise_scale, count)
    clean = (lefts @ instance.left_signal) * (rights @ instance.right_signal)
    return BlindBatch(lefts, rights, clean + np.where(corrupted, noise, 0.0), corrupted)


@register_builder(TAG)
def blind_model(model_tag: str, point: Vector, left: Vector, right: Vector, target: float):
    """The sampled model of |<l, x><r, y> - b| based at the stacked `point`."""
    if model_tag == "proxpoint":
        return BilinearAbsModel(left, right, float(target))

    x, y = point[: left.size], point[left.size :]
    p, q = float(left @ x), float(right @ y)
    residual = p * q - float(target)
    slope = np.concatenate([q * left, p * right])
    if model_tag == "proxlinear":
        return AffineAbsModel(residual, slope, point)

    sign = float(np.sign(residual))
    if model_tag == "subgradient":
        return LinearModel(abs(residual), sign * slope, point)
    if model_tag == "clipped":
        return ClippedAffineModel(AffineAbsModel(abs(residual), sign * slope, point), 0.0)
    raise UnknownModel(TAG, model_tag)


def blind_losses(point: Vector, batch: BlindBatch) -> np.ndarray:
    split = batch.lefts.shape[1]
    return np.abs((batch.lefts @ point[:split]) * (batch.rights @ point[split:]) - batch.targets)


def _ball(v: Vector, radius: float) -> Vector:
    norm = float(np.linalg.norm(v))
    return v if norm <= radius else v * (radius / norm)


def project_feasible(point: Vector, instance: BlindInstance) -> Vector:
    """Projects x and y independently onto the balls of radius nu * D."""
    split = instance.left_signal.size
    bound = instance.radius * instance.scale
    x, y = point[:split], point[split:]
    px, py = _ball(x, bound), _ball(y, bound)
    if px is x and py is y:
        return point
    return np.concatenate([px, py])


def dist_blind(point: Vector, instance: BlindInstance) -> float:
    """Distance to {(a x_bar, y_bar / a) : 1/nu <= |a| <= nu}.

    Interior minimizers in a are real roots of
    a^4 ||x_bar||^2 - a^3 <x, x_bar> + a <y, y_bar> - ||y_bar||^2; the interval
    endpoints cover the rest.
    """
    xbar, ybar, nu = instance.left_signal, instance.right_signal, instance.radius
    x, y = point[: xbar.size], point[xbar.size :]
    xx, yy = float(xbar @ xbar), float(ybar @ ybar)
    roots = real_roots([xx, -float(x @ xbar), 0.0, float(y @ ybar), -yy])
    lower = 1.0 / nu
    candidates = [a for a in roots if lower <= abs(a) <= nu]
    candidates += [lower, nu, -lower, -nu]

    def squared(a: float) -> float:
        dx, dy = x - a * xbar, y - ybar / a
        return float(dx @ dx + dy @ dy)

    return math.sqrt(min(squared(a) for a in candidates))


class BlindDeconvolution(Problem):
    tag = TAG

    def __init__(self, instance: BlindInstance):
        self.instance = instance
        self._ground_truth = np.concatenate([instance.left_signal, instance.right_signal])

    @property
    def dimension(self) -> int:
        return sum(self.instance.dimensions)

    @property
    def ground_truth(self) -> Vector:
        return self._ground_truth

    def sample(self, rng: np.random.Generator, count: int) -> BlindBatch:
        return sample_blind(self.instance, rng, count)

    def sample_pool(self, rng: np.random.Generator, count: int) -> BlindBatch:
        return sample_blind(self.instance, rng, count, exact_fraction=True)

    def model(self, model_tag: str, point: Vector, batch: BlindBatch, index: int):
        return build_model(TAG, model_tag, point, batch.lefts[index], batch.rights[index], batch.targets[index])

    def losses(self, point: Vector, batch: BlindBatch) -> np.ndarray:
        return blind_losses(point, batch)

    def distance(self, point: Vector) -> float:
        return dist_blind(point, self.instance)

    def project(self, point: Vector) -> Vector:
        return project_feasible(point, self.instance)
