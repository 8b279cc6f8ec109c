from __future__ import annotations

import math
from typing import Any, Literal, Optional

from pydantic import BaseModel, NonNegativeInt, PositiveFloat, PositiveInt, model_validator
from pydantic import Field as PydanticField

import SaveFile as Data
import settings
from problems import MODEL_TAGS

PYDANTIC_CONFIG = {
    "frozen": True,
    "extra": "forbid",
}

ProblemTag = Literal["phase", "blind", "logistic"]
AlgorithmTag = Literal["rmba", "rpmba", "rda", "proxgrad-poly"]
ModelTag = Literal["subgradient", "clipped", "proxlinear", "proxpoint", "proxgradient"]


class ExperimentConfig(BaseModel):
    """One experiment: problem, model, algorithm, schedule inputs and output options."""

    problem: ProblemTag = "phase"
    model: Optional[ModelTag] = None
    algorithm: AlgorithmTag = "rmba"

    # problem size and measurement model
    d: PositiveInt = 100
    d2: Optional[PositiveInt] = None
    p_fail: float = PydanticField(0.0, ge=0.0, lt=0.5)
    noise_variance: PositiveFloat = settings.NOISE_VARIANCE
    radius: float = PydanticField(settings.BLIND_RADIUS, gt=1.0)
    mode: Literal["streaming", "finite"] = "streaming"
    m_samples: Optional[PositiveInt] = None
    mc_samples: Optional[PositiveInt] = None

    # schedule inputs
    eps: PositiveFloat = settings.TARGET_EPS
    gamma: float = PydanticField(settings.GAMMA, gt=0.0, lt=2.0)
    delta2: PositiveFloat = settings.DELTA2
    delta_prime: float = PydanticField(settings.DELTA_PRIME, gt=0.0, lt=1.0)
    # None: settings.R0 on phase and blind, the start-to-reference distance on logistic
    r0: Optional[PositiveFloat] = None
    enforce_tube: bool = True
    inner_cap: Optional[PositiveInt] = None
    stages: Optional[PositiveInt] = None
    copies: Optional[PositiveInt] = None
    inner_output: Literal["sampled", "average", "last"] = "sampled"
    # None: highprob for rpmba, nonconvex otherwise
    schedule: Optional[Literal["convex", "nonconvex", "highprob"]] = None

    # runs
    trials: PositiveInt = 10
    seed: NonNegativeInt = 0
    workers: PositiveInt = 1
    checkpoints: PositiveInt = settings.CHECKPOINTS_PER_STAGE

    # stepsize sensitivity
    exponent: int = 0
    p_min: int = settings.SENSITIVITY_RANGE[0]
    p_max: int = settings.SENSITIVITY_RANGE[1]
    sensitivity_trials: PositiveInt = settings.SENSITIVITY_TRIALS

    # sparse logistic regression
    tau: PositiveFloat = 0.01
    n_samples: PositiveInt = 2000
    sparsity: NonNegativeInt = 5
    sharpness_exponent: float = 0.0
    # identification tries every mu = tau sqrt(d) 2^-p of the grid
    sharpness_grid: Optional[tuple[float, ...]] = None
    init: Literal["zero", "reference"] = "zero"
    rda_gammas: tuple[PositiveFloat, ...] = settings.RDA_GAMMA_GRID
    poly_exponents: tuple[PositiveFloat, ...] = settings.POLY_EXPONENTS
    poly_scale: PositiveFloat = 1.0
    idx_images: Optional[str] = None
    idx_labels: Optional[str] = None
    digits: tuple[int, int] = (0, 1)

    # output
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    model_config = PYDANTIC_CONFIG

    @model_validator(mode="before")
    @classmethod
    def _default_model(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("model") is None:
            data = {**data, "model": "proxgradient" if data.get("problem") == "logistic" else "proxlinear"}
        return data

    @model_validator(mode="after")
    def _check_combination(self) -> ExperimentConfig:
        if self.model not in MODEL_TAGS:
            raise ValueError(f"unknown model '{self.model}'")
        if (self.problem == "logistic") != (self.model == "proxgradient"):
            raise ValueError(f"model '{self.model}' does not apply to problem '{self.problem}'")
        if self.algorithm in ("rda", "proxgrad-poly") and self.problem != "logistic":
            raise ValueError(f"algorithm '{self.algorithm}' needs the logistic problem")
        if self.schedule is not None and (self.schedule == "highprob") != (self.algorithm == "rpmba"):
            raise ValueError(f"schedule '{self.schedule}' does not apply to algorithm '{self.algorithm}'")
        if self.p_min > self.p_max:
            raise ValueError(f"empty exponent range [{self.p_min}, {self.p_max}]")
        if self.problem == "logistic" and self.sparsity > self.d:
            raise ValueError(f"sparsity {self.sparsity} exceeds dimension {self.d}")
        if (self.idx_images is None) != (self.idx_labels is None):
            raise ValueError("IDX images and labels must be given together")
        return self

    @classmethod
    def from_file(cls, path: str, **overrides: Any) -> ExperimentConfig:
        """Loads a JSON config file; non-None overrides replace its fields."""
        return cls(**{**Data.read_document(path), **_present(overrides)})

    def with_overrides(self, **overrides: Any) -> ExperimentConfig:
        return type(self)(**{**self.model_dump(), **_present(overrides)})

    @property
    def dimensions(self) -> tuple[int, int]:
        return self.d, self.d if self.d2 is None else self.d2

    @property
    def pool_size(self) -> int:
        """m for finite mode; FINITE_SAMPLE_FACTOR times the ambient dimension by default."""
        if self.m_samples is not None:
            return self.m_samples
        ambient = sum(self.dimensions) if self.problem == "blind" else self.d
        return settings.FINITE_SAMPLE_FACTOR * ambient

    @property
    def noise_scale(self) -> float:
        return math.sqrt(self.noise_variance)


def _present(overrides: dict[str, Any]) -> dict[str, Any]:
    return {k: v for k, v in overrides.items() if v is not None}
