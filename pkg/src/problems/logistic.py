"""Sparse logistic regression over samples (x_i, y_i), y_i in {-1, +1}.

Points are stacked as (w, b): `dimension` weights followed by the intercept.
Only the weights carry the l1 penalty tau * ||w||_1.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

import settings
from prox_kit import LinearL1Model, QuadraticAnchor, Vector, linear_l1_prox

from .base import Problem, UnknownModel, build_model, register_builder

logger = logging.getLogger(__name__)

TAG = "logistic"
REFERENCE_TOLERANCE = 1e-9
REFERENCE_MAX_ITERATIONS = 200_000


class MissingReference(Exception):
    def __init__(self):
        super().__init__("logistic instance has no reference solution")


@dataclass(frozen=True, eq=False)
class LogisticInstance:
    features: np.ndarray
    labels: np.ndarray
    tau: float
    reference: Vector | None = None
    planted: Vector | None = None
    tolerance: float = settings.SUPPORT_TOLERANCE

    def __post_init__(self) -> None:
        if not self.tau > 0.0:
            raise ValueError(f"regularizer must be positive, got {self.tau}")
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.size:
            raise ValueError(f"features {self.features.shape} do not match {self.labels.size} labels")
        if not np.all(np.abs(self.labels) == 1.0):
            raise ValueError("labels must be -1 or +1")

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    @property
    def count(self) -> int:
        return self.labels.size

    @property
    def support(self) -> np.ndarray:
        """Indices i with |w_i| above the numerical tolerance in the reference solution."""
        if self.reference is None:
            raise MissingReference()
        return np.flatnonzero(np.abs(self.reference[: self.dimension]) > self.tolerance)

    @property
    def off_support(self) -> np.ndarray:
        mask = np.ones(self.dimension, dtype=bool)
        mask[self.support] = False
        return np.flatnonzero(mask)

    def with_reference(self, reference: Vector) -> LogisticInstance:
        return dataclasses.replace(self, reference=reference)


@dataclass(frozen=True, eq=False)
class LogisticBatch:
    features: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return self.labels.size

    def take(self, indices: np.ndarray) -> LogisticBatch:
        return LogisticBatch(self.features[indices], self.labels[indices])


def _margins(point: Vector, features: np.ndarray) -> np.ndarray:
    return features @ point[:-1] + point[-1]


def logistic_losses(point: Vector, features: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """log(1 + exp(-y_i (<w, x_i> + b))) per sample."""
    return np.logaddexp(0.0, -labels * _margins(point, features))


def logistic_gradient(point: Vector, features: np.ndarray, labels: np.ndarray) -> Vector:
    """Gradient of the mean logistic loss over the given samples."""
    weights = -labels * expit(-labels * _margins(point, features)) / labels.size
    return np.append(features.T @ weights, weights.sum())


def logistic_objective(point: Vector, instance: LogisticInstance) -> float:
    """Mean logistic loss plus tau * ||w||_1."""
    smooth = float(logistic_losses(point, instance.features, instance.labels).mean())
    return smooth + instance.tau * float(np.abs(point[:-1]).sum())


def smoothness(features: np.ndarray) -> float:
    """Lipschitz constant of the mean logistic loss gradient."""
    augmented = np.hstack([features, np.ones((features.shape[0], 1))])
    return float(np.linalg.norm(augmented, 2) ** 2 / (4.0 * features.shape[0]))


def _prox_gradient(point: Vector, instance: LogisticInstance, lipschitz: float) -> Vector:
    gradient = logistic_gradient(point, instance.features, instance.labels)
    model = LinearL1Model(0.0, gradient, point, instance.tau, instance.dimension)
    return linear_l1_prox(model, QuadraticAnchor(lipschitz, point))


def solve_reference(
    instance: LogisticInstance,
    tolerance: float = REFERENCE_TOLERANCE,
    max_iterations: int = REFERENCE_MAX_ITERATIONS,
) -> Vector:
    """Full-batch accelerated proximal gradient with gradient restarts.

    Stops once the gradient mapping at the extrapolated point has norm at
    most `tolerance`; returns the last proximal step.
    """
    lipschitz = smoothness(instance.features)
    x = np.zeros(instance.dimension + 1)
    y, t = x, 1.0
    for iteration in range(max_iterations):
        x_next = _prox_gradient(y, instance, lipschitz)
        if lipschitz * np.linalg.norm(y - x_next) <= tolerance:
            logger.debug("reference solution after %d iterations", iteration + 1)
            return x_next
        if float((y - x_next) @ (x_next - x)) > 0.0:
            t = 1.0
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = x_next + ((t - 1.0) / t_next) * (x_next - x)
        x, t = x_next, t_next
    logger.warning("reference solver stopped after %d iterations without reaching %.1e", max_iterations, tolerance)
    return x


def synth_logistic(
    dimension: int,
    count: int,
    sparsity: int,
    tau: float,
    rng: np.random.Generator,
    flip: float = 0.05,
) -> LogisticInstance:
    """A planted sparse classifier with Gaussian features and randomly flipped labels."""
    if not 0 <= sparsity <= dimension:
        raise ValueError(f"sparsity must lie in [0, {dimension}], got {sparsity}")
    planted = np.zeros(dimension + 1)
    active = rng.choice(dimension, size=sparsity, replace=False)
    planted[active] = rng.choice([-1.0, 1.0], size=sparsity) * (1.0 + rng.random(sparsity))
    planted[-1] = 0.5 * rng.standard_normal()

    features = rng.standard_normal((count, dimension))
    labels = np.where(_margins(planted, features) >= 0.0, 1.0, -1.0)
    labels[rng.random(count) < flip] *= -1.0

    instance = LogisticInstance(features, labels, tau, planted=planted)
    return instance.with_reference(solve_reference(instance))


def dist_support(point: Vector, instance: LogisticInstance) -> float:
    """Norm of the weights outside the reference support."""
    return float(np.linalg.norm(point[instance.off_support]))


def dist_to_reference(point: Vector, instance: LogisticInstance) -> float:
    if instance.reference is None:
        raise MissingReference()
    return float(np.linalg.norm(point - instance.reference))


def draw_indices(instance: LogisticInstance, rng: np.random.Generator, count: int) -> np.ndarray:
    """Sample indices, uniform with replacement."""
    return rng.integers(instance.count, size=count)


@register_builder(TAG)
def logistic_model(model_tag: str, point: Vector, feature: Vector, label: float, tau: float):
    """Linearized logistic loss of one sample plus the exact l1 penalty."""
    if model_tag != "proxgradient":
        raise UnknownModel(TAG, model_tag)
    features, labels = feature[None, :], np.array([label])
    loss = float(logistic_losses(point, features, labels)[0])
    return LinearL1Model(loss, logistic_gradient(point, features, labels), point, tau, feature.size)


class LogisticRegression(Problem):
    tag = TAG

    def __init__(self, instance: LogisticInstance):
        if instance.reference is None:
            raise MissingReference()
        self.instance = instance

    @property
    def dimension(self) -> int:
        return self.instance.dimension + 1

    @property
    def ground_truth(self) -> Vector:
        return self.instance.reference

    def sample(self, rng: np.random.Generator, count: int) -> LogisticBatch:
        indices = draw_indices(self.instance, rng, count)
        return LogisticBatch(self.instance.features[indices], self.instance.labels[indices])

    def model(self, model_tag: str, point: Vector, batch: LogisticBatch, index: int):
        return build_model(TAG, model_tag, point, batch.features[index], batch.labels[index], self.instance.tau)

    def losses(self, point: Vector, batch: LogisticBatch) -> np.ndarray:
        penalty = self.instance.tau * float(np.abs(point[:-1]).sum())
        return logistic_losses(point, batch.features, batch.labels) + penalty

    def distance(self, point: Vector) -> float:
        return dist_support(point, self.instance)

    def objective(self, point: Vector) -> float:
        return logistic_objective(point, self.instance)
