"""Convex stochastic models and the quadratic anchors they are minimized against.

Every model is a frozen value object holding the data of one sampled model
f_y(., z). `value(u)` evaluates the model; the matching solver in
`prox_kit.prox` minimizes value(u) + (weight/2)||u - center||^2 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

Vector = npt.NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class QuadraticAnchor:
    """(weight/2)||u - center||^2. Weight is an inverse stepsize."""

    weight: float
    center: Vector

    def __post_init__(self) -> None:
        if not self.weight > 0.0:
            raise ValueError(f"anchor weight must be positive, got {self.weight}")

    @classmethod
    def compose(
        cls,
        alpha: float,
        current: Vector,
        rho: float = 0.0,
        origin: Vector | None = None,
    ) -> QuadraticAnchor:
        """Merges 1/(2 alpha)||u - current||^2 + (rho/2)||u - origin||^2 into one anchor.

        The two differ by an additive constant, so both have the same minimizers.
        """
        inverse = 1.0 / alpha
        if rho == 0.0 or origin is None:
            return cls(inverse, current)
        weight = inverse + rho
        return cls(weight, (inverse * current + rho * origin) / weight)

    def split(self, at: int) -> tuple[QuadraticAnchor, QuadraticAnchor]:
        """Anchors for the blocks center[:at] and center[at:]."""
        return (
            QuadraticAnchor(self.weight, self.center[:at]),
            QuadraticAnchor(self.weight, self.center[at:]),
        )

    def value(self, u: Vector) -> float:
        diff = u - self.center
        return 0.5 * self.weight * float(diff @ diff)


@dataclass(frozen=True, slots=True)
class AffineAbsModel:
    """u -> |offset + <slope, u - basepoint>|."""

    offset: float
    slope: Vector
    basepoint: Vector

    def rebase(self, center: Vector) -> AffineAbsModel:
        """Same affine function, offset measured at `center`."""
        if center is self.basepoint:
            return self
        return AffineAbsModel(self.offset + float(self.slope @ (center - self.basepoint)), self.slope, center)

    def affine(self, u: Vector) -> float:
        return self.offset + float(self.slope @ (u - self.basepoint))

    def value(self, u: Vector) -> float:
        return abs(self.affine(u))


@dataclass(frozen=True, slots=True)
class ClippedAffineModel:
    """u -> max{offset + <slope, u - basepoint>, lower_bound}."""

    affine: AffineAbsModel
    lower_bound: float = 0.0

    def value(self, u: Vector) -> float:
        return max(self.affine.affine(u), self.lower_bound)


@dataclass(frozen=True, slots=True)
class LinearModel:
    """u -> offset + <slope, u - basepoint>, the plain subgradient model."""

    offset: float
    slope: Vector
    basepoint: Vector

    def value(self, u: Vector) -> float:
        return self.offset + float(self.slope @ (u - self.basepoint))


@dataclass(frozen=True, slots=True)
class QuadraticAbsModel:
    """u -> |(<direction, u>)^2 - target|."""

    direction: Vector
    target: float

    def __post_init__(self) -> None:
        if not float(self.direction @ self.direction) > 0.0:
            raise ValueError("direction must be nonzero")

    def value(self, u: Vector) -> float:
        v = float(self.direction @ u)
        return abs(v * v - self.target)


@dataclass(frozen=True, slots=True)
class BilinearAbsModel:
    """(x, y) -> |<left, x><right, y> - target|, evaluated on the stacked vector (x, y)."""

    left: Vector
    right: Vector
    target: float

    def __post_init__(self) -> None:
        if not (float(self.left @ self.left) > 0.0 and float(self.right @ self.right) > 0.0):
            raise ValueError("left and right directions must be nonzero")

    def value(self, u: Vector) -> float:
        split = self.left.size
        return abs(float(self.left @ u[:split]) * float(self.right @ u[split:]) - self.target)


@dataclass(frozen=True, slots=True)
class LinearL1Model:
    """u -> offset + <gradient, u - basepoint> + tau * ||u[:penalized]||_1.

    The proximal-gradient model of a smooth loss plus an l1 penalty on the
    first `penalized` coordinates (the weights; the intercept stays free).
    """

    offset: float
    gradient: Vector
    basepoint: Vector
    tau: float
    penalized: int

    def value(self, u: Vector) -> float:
        linear = self.offset + float(self.gradient @ (u - self.basepoint))
        return linear + self.tau * float(np.abs(u[: self.penalized]).sum())
