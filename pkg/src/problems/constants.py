"""Sharpness, accuracy and Lipschitz constants of the problem families.

The Gaussian moments have closed forms; `estimate_moments` checks them by
Monte Carlo and can stand in for them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

import settings

from .base import SharpnessProfile
from .blind import BlindInstance
from .logistic import LogisticInstance
from .phase import PhaseInstance

logger = logging.getLogger(__name__)

GAUSSIAN_MU = 2.0 / math.pi


class TooFewSamples(Exception):
    def __init__(self, requested: int, minimum: int):
        super().__init__(f"Monte Carlo needs at least {minimum} samples, got {requested}")


@dataclass(frozen=True)
class MomentEstimate:
    """Measurement-law moments for unit v orthogonal to unit w, with standard errors.

    mu: E|<a, v><a, w>|, eta: E<a, v>^2, lipschitz: sqrt(E[<a, v>^2 ||a||^2]).
    """

    mu: float
    eta: float
    lipschitz: float
    mu_error: float = 0.0
    eta_error: float = 0.0
    lipschitz_error: float = 0.0

    @classmethod
    def gaussian(cls, dimension: int) -> MomentEstimate:
        return cls(GAUSSIAN_MU, 1.0, math.sqrt(dimension + 2.0))


def _standard_error(values: np.ndarray) -> float:
    return float(values.std(ddof=1) / math.sqrt(values.size))


def estimate_moments(
    dimension: int,
    samples: int,
    rng: np.random.Generator,
    chunk: int = 100_000,
) -> MomentEstimate:
    """Monte Carlo estimate of the Gaussian measurement moments in R^dimension."""
    if dimension < 2:
        raise ValueError(f"need two orthogonal directions, got dimension {dimension}")
    if samples < settings.MC_MIN_SAMPLES:
        raise TooFewSamples(samples, settings.MC_MIN_SAMPLES)

    # Rotation invariance lets v, w be the first two basis vectors.
    products, squares, weighted = [], [], []
    for start in range(0, samples, chunk):
        a = rng.standard_normal((min(chunk, samples - start), dimension))
        products.append(np.abs(a[:, 0] * a[:, 1]))
        squares.append(a[:, 0] ** 2)
        weighted.append(a[:, 0] ** 2 * np.einsum("ij,ij->i", a, a))
    products, squares, weighted = (np.concatenate(v) for v in (products, squares, weighted))

    second = float(weighted.mean())
    lipschitz = math.sqrt(second)
    return MomentEstimate(
        mu=float(products.mean()),
        eta=float(squares.mean()),
        lipschitz=lipschitz,
        mu_error=_standard_error(products),
        eta_error=_standard_error(squares),
        # delta method for the square root
        lipschitz_error=_standard_error(weighted) / (2.0 * lipschitz),
    )


def _moments(dimension: int, mc_samples: int | None, rng: np.random.Generator | None) -> MomentEstimate:
    if mc_samples is None:
        return MomentEstimate.gaussian(dimension)
    estimate = estimate_moments(dimension, mc_samples, rng if rng is not None else np.random.default_rng())
    logger.info(
        "Monte Carlo moments at d=%d: mu=%.4f+-%.4f eta=%.4f+-%.4f L=%.4f+-%.4f",
        dimension,
        estimate.mu,
        estimate.mu_error,
        estimate.eta,
        estimate.eta_error,
        estimate.lipschitz,
        estimate.lipschitz_error,
    )
    return estimate


def phase_constants(instance: PhaseInstance, moments: MomentEstimate, gamma: float) -> SharpnessProfile:
    norm = float(np.linalg.norm(instance.signal))
    growth = (1.0 - 2.0 * instance.p_fail) * moments.mu
    return SharpnessProfile(
        mu=growth * norm,
        eta=2.0 * moments.eta,
        lipschitz=2.0 * moments.lipschitz * norm * (1.0 + growth / moments.eta),
        gamma=gamma,
    )


def blind_constants(
    instance: BlindInstance,
    left: MomentEstimate,
    right: MomentEstimate,
    gamma: float,
) -> SharpnessProfile:
    root_scale = math.sqrt(instance.scale)
    mu_tilde = min(left.mu, right.mu)
    eta_tilde = max(left.eta, right.eta)
    # sqrt(d1 + d2 + 2 sqrt((d1 + 2)(d2 + 2))) for Gaussians
    lipschitz_tilde = math.sqrt(
        left.lipschitz**2 - 2.0 + right.lipschitz**2 - 2.0 + 2.0 * left.lipschitz * right.lipschitz
    )
    return SharpnessProfile(
        mu=mu_tilde * (1.0 - 2.0 * instance.p_fail) * root_scale / (2.0 * math.sqrt(2.0) * (instance.radius + 1.0)),
        eta=eta_tilde,
        lipschitz=instance.radius * lipschitz_tilde * root_scale,
        gamma=gamma,
    )


def logistic_constants(instance: LogisticInstance, sharpness_exponent: float, gamma: float) -> SharpnessProfile:
    """Convex problem: eta = 0 and mu = tau sqrt(d) 2^-p for the chosen exponent p."""
    augmented_norms = np.einsum("ij,ij->i", instance.features, instance.features) + 1.0
    lipschitz = math.sqrt(float(augmented_norms.mean()))
    mu = instance.tau * math.sqrt(instance.dimension) * 2.0 ** (-sharpness_exponent)
    return SharpnessProfile(mu=mu, eta=0.0, lipschitz=lipschitz, gamma=gamma)


def estimate_constants(
    problem_tag: str,
    instance: PhaseInstance | BlindInstance | LogisticInstance,
    mc_samples: int | None = None,
    rng: np.random.Generator | None = None,
    gamma: float = settings.GAMMA,
    sharpness_exponent: float = 0.0,
) -> SharpnessProfile:
    """Composes the measurement-law moments into the problem's SharpnessProfile.

    With `mc_samples` unset the Gaussian closed forms are used; otherwise the
    moments come from Monte Carlo with at least MC_MIN_SAMPLES draws.
    """
    if problem_tag == "phase":
        return phase_constants(instance, _moments(instance.dimension, mc_samples, rng), gamma)
    if problem_tag == "blind":
        d1, d2 = instance.dimensions
        return blind_constants(instance, _moments(d1, mc_samples, rng), _moments(d2, mc_samples, rng), gamma)
    if problem_tag == "logistic":
        return logistic_constants(instance, sharpness_exponent, gamma)
    raise ValueError(f"unknown problem '{problem_tag}'")
