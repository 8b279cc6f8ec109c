"""Parameter schedules of the restart schemes, from the problem constants."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from problems import SharpnessProfile


class ScheduleRejected(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"schedule rejected: {reason}")


@dataclass(frozen=True)
class Schedule:
    """
    Resolved parameters of one restart scheme.

    Attributes:
        kind (str): "convex", "nonconvex" or "highprob".
        stages (int): T = ceil(log2(R0 / eps)).
        inner (int): K, inner steps per stage (K + 1 samples).
        stepsize (float): alpha_0.
        radius (float): R0.
        target (float): eps.
        failure (float): delta, delta_2 or delta'.
        lipschitz (float): L, kept to recompute alpha_0 when K is capped.
        copies (int): M, ensemble size (1 outside the ensemble scheme).
        weight (float | None): rho_0.
        tolerance (float | None): eps_0.
        gamma (float | None): tube parameter.
        sample_bound (float): the scheme's total sample bound.
        success_probability (float | None): lower bound on the success probability.
    """

    kind: str
    stages: int
    inner: int
    stepsize: float
    radius: float
    target: float
    failure: float
    lipschitz: float
    copies: int = 1
    weight: float | None = None
    tolerance: float | None = None
    gamma: float | None = None
    sample_bound: float = math.inf
    success_probability: float | None = None

    def stepsize_at(self, t: int) -> float:
        return self.stepsize * 2.0**-t

    def weight_at(self, t: int) -> float | None:
        return None if self.weight is None else self.weight * 2.0**t

    def tolerance_at(self, t: int) -> float | None:
        return None if self.tolerance is None else self.tolerance * 2.0**-t

    def capped(self, inner_cap: int | None = None, stages: int | None = None) -> Schedule:
        """Reduces K and T; alpha_0 follows the capped K through the same formula."""
        inner = self.inner if inner_cap is None else min(self.inner, inner_cap)
        if inner < 1:
            raise ScheduleRejected(f"inner iteration cap {inner_cap} leaves no steps")
        resolved_stages = self.stages if stages is None else min(self.stages, stages)
        if resolved_stages < 1:
            raise ScheduleRejected(f"stage cap {stages} leaves no stages")
        return dataclasses.replace(
            self,
            inner=inner,
            stages=resolved_stages,
            stepsize=_initial_stepsize(self.kind, self.radius, self.lipschitz, inner),
        )

    def header(self) -> dict[str, float | int | None]:
        return {
            "T": self.stages,
            "K": self.inner,
            "M": self.copies,
            "alpha0": self.stepsize,
            "rho0": self.weight,
            "eps0": self.tolerance,
        }


def stage_count(radius: float, target: float) -> int:
    """T = ceil(log2(R0 / eps)); rejects eps >= R0."""
    if not (radius > 0.0 and target > 0.0):
        raise ScheduleRejected(f"R0 = {radius} and eps = {target} must be positive")
    if target >= radius:
        raise ScheduleRejected(f"target accuracy {target} is not below the initial radius {radius}")
    return math.ceil(math.log2(radius / target))


def _initial_stepsize(kind: str, radius: float, lipschitz: float, inner: int) -> float:
    divisor = 2.0 if kind == "convex" else 1.0
    return math.sqrt(radius**2 / (divisor * lipschitz**2 * (inner + 1)))


def _check_constants(mu: float, lipschitz: float) -> None:
    if not (mu > 0.0 and lipschitz > 0.0):
        raise ScheduleRejected(f"constants mu = {mu} and L = {lipschitz} must be positive")


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 2.0:
        raise ScheduleRejected(f"tube parameter gamma = {gamma} must lie in (0, 2)")


def schedule_convex(radius: float, target: float, delta: float, mu: float, lipschitz: float) -> Schedule:
    _check_constants(mu, lipschitz)
    if not delta > 0.0:
        raise ScheduleRejected(f"failure budget delta = {delta} must be positive")
    stages = stage_count(radius, target)
    ratio = (lipschitz / (delta * mu)) ** 2
    inner = math.floor(8.0 * stages**2 * ratio)
    return Schedule(
        kind="convex",
        stages=stages,
        inner=inner,
        stepsize=_initial_stepsize("convex", radius, lipschitz, inner),
        radius=radius,
        target=target,
        failure=delta,
        lipschitz=lipschitz,
        sample_bound=8.0 * ratio * stages**3,
        success_probability=1.0 - delta,
    )


def schedule_nonconvex(
    radius: float,
    target: float,
    delta2: float,
    gamma: float,
    mu: float,
    lipschitz: float,
    eta: float = 0.0,
    enforce_tube: bool = True,
) -> Schedule:
    _check_constants(mu, lipschitz)
    _check_gamma(gamma)
    if not delta2 > 0.0:
        raise ScheduleRejected(f"failure budget delta2 = {delta2} must be positive")
    tube = math.inf if eta == 0.0 else gamma * mu / eta
    if enforce_tube and radius > tube:
        raise ScheduleRejected(f"R0 = {radius:.6g} exceeds the tube radius gamma*mu/eta = {tube:.6g}")
    stages = stage_count(radius, target)
    factor = 16.0 / (2.0 - gamma) ** 2 * (lipschitz / (delta2 * mu)) ** 2
    inner = math.floor(factor * stages**2)
    return Schedule(
        kind="nonconvex",
        stages=stages,
        inner=inner,
        stepsize=_initial_stepsize("nonconvex", radius, lipschitz, inner),
        radius=radius,
        target=target,
        failure=delta2,
        lipschitz=lipschitz,
        gamma=gamma,
        sample_bound=factor * stages**3,
        success_probability=1.0 - (8.0 / 3.0) * radius**2 * (eta / (gamma * mu)) ** 2 - delta2,
    )


def schedule_highprob(
    radius: float,
    target: float,
    delta_prime: float,
    gamma: float,
    mu: float,
    eta: float,
    lipschitz: float,
    enforce_tube: bool = True,
) -> Schedule:
    _check_constants(mu, lipschitz)
    _check_gamma(gamma)
    if not 0.0 < delta_prime < 1.0:
        raise ScheduleRejected(f"failure budget delta' = {delta_prime} must lie in (0, 1)")
    bound = math.inf if eta == 0.0 else gamma * mu / (4.0 * eta)
    if enforce_tube and radius > bound:
        raise ScheduleRejected(f"R0 = {radius:.6g} exceeds gamma*mu/(4 eta) = {bound:.6g}")
    stages = stage_count(radius, target)
    inner = math.floor((864.0 * lipschitz / mu) ** 2)
    copies = math.ceil(48.0 * math.log(stages / delta_prime))
    return Schedule(
        kind="highprob",
        stages=stages,
        inner=inner,
        stepsize=_initial_stepsize("highprob", radius, lipschitz, inner),
        radius=radius,
        target=target,
        failure=delta_prime,
        lipschitz=lipschitz,
        copies=copies,
        weight=mu / (2.0 * radius),
        tolerance=radius / 3.0,
        gamma=gamma,
        sample_bound=float(inner * stages * copies),
        success_probability=1.0 - delta_prime,
    )


def schedule_for(
    kind: str,
    profile: SharpnessProfile,
    radius: float,
    target: float,
    failure: float,
    enforce_tube: bool = True,
) -> Schedule:
    """The schedule of `kind` for a problem's constants."""
    if kind == "convex":
        return schedule_convex(radius, target, failure, profile.mu, profile.lipschitz)
    if kind == "nonconvex":
        return schedule_nonconvex(
            radius, target, failure, profile.gamma, profile.mu, profile.lipschitz, profile.eta, enforce_tube
        )
    if kind == "highprob":
        return schedule_highprob(
            radius, target, failure, profile.gamma, profile.mu, profile.eta, profile.lipschitz, enforce_tube
        )
    raise ValueError(f"unknown schedule '{kind}'")
