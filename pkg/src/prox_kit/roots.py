"""Real roots of low-degree polynomials.

Companion-matrix roots (numpy) are polished with safeguarded Newton steps.
When no real root survives, sign changes on a bracketing scan are refined
with Brent's method and the event is broadcast on `fallback_used`.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq

from utils import Signal

logger = logging.getLogger(__name__)

ROOT_TOLERANCE = 1e-12
SCAN_TOLERANCE = 1e-10
_IMAG_SLACK = 1e-6
_SCAN_POINTS = 4001

fallback_used: Signal[np.ndarray] = Signal()


def _polish(coefficients: np.ndarray, root: float, steps: int = 4) -> float:
    derivative = np.polyder(coefficients)
    best, best_residual = root, abs(np.polyval(coefficients, root))
    x = root
    for _ in range(steps):
        slope = np.polyval(derivative, x)
        if slope == 0.0 or best_residual <= ROOT_TOLERANCE:
            break
        x = x - np.polyval(coefficients, x) / slope
        residual = abs(np.polyval(coefficients, x))
        if residual < best_residual:
            best, best_residual = x, residual
    return float(best)


def cauchy_bound(coefficients: np.ndarray) -> float:
    """Every root has modulus at most this value."""
    return 1.0 + float(np.max(np.abs(coefficients[1:] / coefficients[0])))


def bracketed_roots(coefficients: np.ndarray) -> np.ndarray:
    """Real roots found by scanning [-B, B] for sign changes, B the Cauchy bound."""
    bound = cauchy_bound(coefficients)
    grid = np.linspace(-bound, bound, _SCAN_POINTS)
    values = np.polyval(coefficients, grid)
    roots = [float(x) for x, v in zip(grid, values) if v == 0.0]
    for left, right, fl, fr in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if fl * fr < 0.0:
            roots.append(brentq(lambda x: np.polyval(coefficients, x), left, right, xtol=SCAN_TOLERANCE))
    return np.asarray(roots, dtype=float)


def real_roots(coefficients: ArrayLike) -> np.ndarray:
    """Real roots of the polynomial with `coefficients`, highest degree first."""
    coefficients = np.trim_zeros(np.asarray(coefficients, dtype=float), "f")
    if coefficients.size <= 1:
        return np.empty(0)
    roots = np.roots(coefficients)
    keep = np.abs(roots.imag) <= _IMAG_SLACK * np.maximum(1.0, np.abs(roots))
    found = np.array([_polish(coefficients, float(r)) for r in roots[keep].real])
    if found.size:
        return found
    logger.warning("no real root from companion matrix; falling back to bracketed scan")
    fallback_used.emit(coefficients)
    return bracketed_roots(coefficients)
