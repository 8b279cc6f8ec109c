"""
This module contains the default values of the experiment runner.

Each value is read from the settings file (settings.json next to this module,
or the file named by STEPDECAY_SETTINGS) and falls back to the literal default.
"""

import math
import os
from typing import Any

from dotenv import load_dotenv

import SaveFile as Data
from FileSystem import SETTINGS_FILE

load_dotenv()

_SETTINGS_FILE = os.getenv("STEPDECAY_SETTINGS", SETTINGS_FILE)


# Function to retrieve settings from the SaveFile module.
def _get_setting(setting_name: str) -> tuple[Any, bool]:
    try:
        return Data.get_setting(setting_name, _SETTINGS_FILE), True
    except (Data.NotFoundException, Data.InvalidDocument):
        return None, False


def _number(setting_name: str, default: float) -> float:
    value, found = _get_setting(setting_name)
    if found and isinstance(value, (int, float)) and not isinstance(value, bool):
        return value
    return default


# measurement model
NOISE_VARIANCE: float = _number("noise_variance", 100.0)
BLIND_RADIUS: float = _number("blind_radius", math.sqrt(3.0))
FINITE_SAMPLE_FACTOR: int = int(_number("finite_sample_factor", 8))

# schedules
GAMMA: float = _number("gamma", 1.0)
R0: float = _number("r0", 0.25)
DELTA2: float = _number("delta2", 1.0 / math.sqrt(10.0))
DELTA_PRIME: float = _number("delta_prime", 0.1)
TARGET_EPS: float = _number("eps", 1e-5)

# traces
CHECKPOINTS_PER_STAGE: int = int(_number("checkpoints_per_stage", 100))
EVALUATION_BATCH: int = int(_number("evaluation_batch", 1000))

# constants
MC_MIN_SAMPLES: int = int(_number("mc_min_samples", 10_000))
SUPPORT_TOLERANCE: float = _number("support_tolerance", 1e-6)

# experiments
SENSITIVITY_TRIALS: int = int(_number("sensitivity_trials", 25))
SENSITIVITY_RANGE: tuple[int, int] = (
    int(_number("sensitivity_p_min", -10)),
    int(_number("sensitivity_p_max", 10)),
)
POLY_EXPONENTS: tuple[float, ...] = (0.5, 2.0 / 3.0, 0.75, 1.0)
RDA_GAMMA_GRID: tuple[float, ...] = (
    tuple(_load[0]) if (_load := _get_setting("rda_gamma_grid"))[1] and isinstance(_load[0], list)
    else tuple(10.0**i for i in range(-3, 4))
)

LOG_LEVEL: str = os.getenv("STEPDECAY_LOG_LEVEL") or (
    _load[0] if (_load := _get_setting("log_level"))[1] and isinstance(_load[0], str) else "INFO"
)
