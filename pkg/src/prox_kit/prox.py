"""Exact minimizers of model(u) + (weight/2)||u - center||^2.

All solvers are pure functions. Degenerate directions (zero slope) return the
anchor center, matching the sign(0) = 0 subgradient convention. Candidate
enumerations break ties by least movement from the center, then by a
nonnegative scalar coordinate.
"""

from __future__ import annotations

import math
from functools import singledispatch
from typing import Callable, Sequence

import numpy as np

from .models import (
    AffineAbsModel,
    BilinearAbsModel,
    ClippedAffineModel,
    LinearL1Model,
    LinearModel,
    QuadraticAbsModel,
    QuadraticAnchor,
    Vector,
)
from .roots import real_roots

_TIE = 1e-12


def _select(candidates: Sequence[tuple[float, ...]], objective: Callable[..., float], movement: Callable[..., float]) -> tuple[float, ...]:
    scored = [(objective(*c), movement(*c), c) for c in candidates]
    best = min(s[0] for s in scored)
    tied = [s for s in scored if s[0] <= best + _TIE * max(1.0, abs(best))]
    least = min(s[1] for s in tied)
    tied = [s for s in tied if s[1] <= least + _TIE * max(1.0, least)]
    nonnegative = [s for s in tied if s[2][0] >= 0.0]
    return (nonnegative or tied)[0][2]


def _capped_step(offset: float, slope: Vector, center: Vector, weight: float) -> Vector:
    norm2 = float(slope @ slope)
    if norm2 == 0.0 or offset == 0.0:
        return center.copy()
    t = min(1.0 / weight, abs(offset) / norm2)
    return center - (math.copysign(1.0, offset) * t) * slope


def affine_abs_prox(model: AffineAbsModel, anchor: QuadraticAnchor) -> Vector:
    """argmin |c' + <g, u - w>| + (lambda/2)||u - w||^2, c' the offset rebased at w."""
    model = model.rebase(anchor.center)
    return _capped_step(model.offset, model.slope, anchor.center, anchor.weight)


def clipped_affine_abs_prox(model: AffineAbsModel, lower_bound: float, anchor: QuadraticAnchor) -> Vector:
    """argmin max{c' + <g, u - w>, lower_bound} + (lambda/2)||u - w||^2."""
    model = model.rebase(anchor.center)
    excess = model.offset - lower_bound
    if excess <= 0.0:
        return anchor.center.copy()
    return _capped_step(excess, model.slope, anchor.center, anchor.weight)


def linear_model_prox(model: LinearModel, anchor: QuadraticAnchor) -> Vector:
    """argmin <G, u> + (lambda/2)||u - w||^2."""
    return anchor.center - model.slope / anchor.weight


def quadratic_abs_prox(model: QuadraticAbsModel, anchor: QuadraticAnchor) -> Vector:
    """Global minimizer of |(a^T u)^2 - b| + (lambda/2)||u - w||^2.

    Only v = a^T u matters; the optimal u moves from w along a. The scalar
    problem is smooth on {v^2 > b} and {v^2 < b}, so the minimizer is a
    stationary point of one of the two pieces or a breakpoint v = +-sqrt(b).
    """
    a, b, w = model.direction, model.target, anchor.center
    norm2 = float(a @ a)
    v0 = float(a @ w)
    kappa = anchor.weight / norm2

    candidates = []
    if b >= 0.0:
        root = math.sqrt(b)
        candidates += [(root,), (-root,)]
    outer = v0 / (1.0 + 2.0 / kappa)
    if outer * outer >= b:
        candidates.append((outer,))
    denominator = 1.0 - 2.0 / kappa
    if denominator > 0.0:
        inner = v0 / denominator
        if inner * inner < b:
            candidates.append((inner,))

    (v,) = _select(
        candidates,
        lambda v: abs(v * v - b) + 0.5 * kappa * (v - v0) ** 2,
        lambda v: abs(v - v0),
    )
    return w + ((v - v0) / norm2) * a


def bilinear_abs_prox(
    model: BilinearAbsModel,
    anchor_x: QuadraticAnchor,
    anchor_y: QuadraticAnchor,
) -> tuple[Vector, Vector]:
    """Global minimizer of |<l,x><r,y> - b| + anchors on x and y.

    Reduces to the scalars p = <l,x>, q = <r,y>. Candidates are the anchor
    centers, stationary points of the two smooth pieces, and stationary
    points on the hyperbola pq = b (roots of a quartic in p), or the two
    axes when b = 0.
    """
    left, right, b = model.left, model.right, model.target
    wx, wy = anchor_x.center, anchor_y.center
    ll, rr = float(left @ left), float(right @ right)
    p0, q0 = float(left @ wx), float(right @ wy)
    kx, ky = anchor_x.weight / ll, anchor_y.weight / rr

    candidates = [(p0, q0)]
    det = kx * ky - 1.0
    if det > 0.0:
        for s in (1.0, -1.0):
            p = (kx * ky * p0 - s * ky * q0) / det
            q = (kx * ky * q0 - s * kx * p0) / det
            if math.copysign(1.0, p * q - b) == s and p * q != b:
                candidates.append((p, q))
    if b == 0.0:
        candidates += [(0.0, q0), (p0, 0.0)]
    else:
        for p in real_roots([kx, -kx * p0, 0.0, ky * b * q0, -ky * b * b]):
            if p != 0.0:
                candidates.append((float(p), b / float(p)))

    p, q = _select(
        candidates,
        lambda p, q: abs(p * q - b) + 0.5 * kx * (p - p0) ** 2 + 0.5 * ky * (q - q0) ** 2,
        lambda p, q: (p - p0) ** 2 / ll + (q - q0) ** 2 / rr,
    )
    return wx + ((p - p0) / ll) * left, wy + ((q - q0) / rr) * right


def soft_threshold(v: Vector, theta: float) -> Vector:
    """Coordinatewise sign(v) * max(|v| - theta, 0)."""
    if theta < 0.0:
        raise ValueError(f"threshold must be nonnegative, got {theta}")
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def linear_l1_prox(model: LinearL1Model, anchor: QuadraticAnchor) -> Vector:
    """Proximal-gradient step: shrink the penalized block of w - g/lambda by tau/lambda."""
    u = anchor.center - model.gradient / anchor.weight
    n = model.penalized
    u[:n] = soft_threshold(u[:n], model.tau / anchor.weight)
    return u


@singledispatch
def solve_anchored(model, anchor: QuadraticAnchor) -> Vector:
    """Exact anchored step for any supported model type."""
    raise TypeError(f"no anchored solver for {type(model).__name__}")


@solve_anchored.register
def _(model: AffineAbsModel, anchor: QuadraticAnchor) -> Vector:
    return affine_abs_prox(model, anchor)


@solve_anchored.register
def _(model: ClippedAffineModel, anchor: QuadraticAnchor) -> Vector:
    return clipped_affine_abs_prox(model.affine, model.lower_bound, anchor)


@solve_anchored.register
def _(model: LinearModel, anchor: QuadraticAnchor) -> Vector:
    return linear_model_prox(model, anchor)


@solve_anchored.register
def _(model: QuadraticAbsModel, anchor: QuadraticAnchor) -> Vector:
    return quadratic_abs_prox(model, anchor)


@solve_anchored.register
def _(model: BilinearAbsModel, anchor: QuadraticAnchor) -> Vector:
    anchor_x, anchor_y = anchor.split(model.left.size)
    x, y = bilinear_abs_prox(model, anchor_x, anchor_y)
    return np.concatenate([x, y])


@solve_anchored.register
def _(model: LinearL1Model, anchor: QuadraticAnchor) -> Vector:
    return linear_l1_prox(model, anchor)
