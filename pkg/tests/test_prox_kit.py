import math
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from test_components import affine_abs_scalar, bilinear_oracle, scalar_oracle

from prox_kit import (
    AffineAbsModel,
    BilinearAbsModel,
    ClippedAffineModel,
    LinearL1Model,
    LinearModel,
    QuadraticAbsModel,
    QuadraticAnchor,
    affine_abs_prox,
    bilinear_abs_prox,
    clipped_affine_abs_prox,
    linear_l1_prox,
    linear_model_prox,
    quadratic_abs_prox,
    real_roots,
    soft_threshold,
    solve_anchored,
)
from prox_kit import roots

INSTANCES = 1000
TOLERANCE = 1e-6


def objective(model, anchor: QuadraticAnchor, u: np.ndarray) -> float:
    return model.value(u) + anchor.value(u)


class TestQuadraticAnchor(unittest.TestCase):
    def test_compose_without_proximal_term(self):
        center = np.array([1.0, -2.0])
        anchor = QuadraticAnchor.compose(0.5, center)

        self.assertEqual(anchor.weight, 2.0)
        self.assertIs(anchor.center, center)

    def test_compose_has_same_minimizers(self):
        rng = np.random.default_rng(0)
        current, origin = rng.standard_normal(3), rng.standard_normal(3)
        anchor = QuadraticAnchor.compose(0.25, current, 3.0, origin)

        for _ in range(20):
            u, v = rng.standard_normal(3), rng.standard_normal(3)
            direct = lambda x: 2.0 * np.sum((x - current) ** 2) + 1.5 * np.sum((x - origin) ** 2)
            self.assertAlmostEqual(direct(u) - direct(v), anchor.value(u) - anchor.value(v), places=10)

    def test_composed_and_explicit_anchors_give_the_same_step(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            d = int(rng.integers(1, 5))
            current, origin = rng.standard_normal(d), rng.standard_normal(d)
            alpha, rho = float(10.0 ** rng.uniform(-2, 1)), float(10.0 ** rng.uniform(-2, 1))
            inverse = 1.0 / alpha
            explicit = QuadraticAnchor(inverse + rho, (inverse * current + rho * origin) / (inverse + rho))
            composed = QuadraticAnchor.compose(alpha, current, rho, origin)

            point = rng.standard_normal(d)
            for model in (
                AffineAbsModel(float(rng.normal()), rng.standard_normal(d), point),
                QuadraticAbsModel(rng.standard_normal(d), float(rng.normal() + 0.5)),
                LinearModel(float(rng.normal()), rng.standard_normal(d), point),
            ):
                assert_array_equal(solve_anchored(model, composed), solve_anchored(model, explicit))

    def test_rejects_nonpositive_weight(self):
        self.assertRaises(ValueError, QuadraticAnchor, 0.0, np.zeros(2))


class TestAffineAbsProx(unittest.TestCase):
    def test_matches_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(INSTANCES):
            d = int(rng.integers(1, 5))
            model = AffineAbsModel(float(rng.normal()), rng.standard_normal(d), rng.standard_normal(d))
            anchor = QuadraticAnchor(float(10.0 ** rng.uniform(-1, 1)), rng.standard_normal(d))
            u = affine_abs_prox(model, anchor)

            rebased = model.rebase(anchor.center)
            norm = float(np.linalg.norm(rebased.slope))
            # the objective only moves along the slope direction
            _, best = affine_abs_scalar(rebased.offset, norm, anchor.weight)
            self.assertAlmostEqual(objective(model, anchor, u), best, delta=TOLERANCE)

    def test_zero_slope_stays_at_center(self):
        anchor = QuadraticAnchor(1.0, np.array([0.3, 0.4]))
        u = affine_abs_prox(AffineAbsModel(2.0, np.zeros(2), np.zeros(2)), anchor)

        assert_array_equal(u, anchor.center)
        self.assertIsNot(u, anchor.center)

    def test_short_step_zeroes_the_linearization(self):
        model = AffineAbsModel(0.01, np.array([1.0, 0.0]), np.zeros(2))
        u = affine_abs_prox(model, QuadraticAnchor(1.0, np.zeros(2)))

        self.assertAlmostEqual(model.affine(u), 0.0, places=15)

    def test_movement_grows_with_the_stepsize(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            d = int(rng.integers(1, 5))
            center = rng.standard_normal(d)
            model = AffineAbsModel(float(rng.normal()), rng.standard_normal(d), rng.standard_normal(d))
            weights = np.sort(10.0 ** rng.uniform(-2, 2, size=8))[::-1]
            moves = [float(np.linalg.norm(affine_abs_prox(model, QuadraticAnchor(w, center)) - center)) for w in weights]
            self.assertTrue(all(b >= a - 1e-12 for a, b in zip(moves, moves[1:])), moves)


class TestClippedProx(unittest.TestCase):
    def test_matches_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(INSTANCES):
            d = int(rng.integers(1, 5))
            affine = AffineAbsModel(float(rng.normal()), rng.standard_normal(d), rng.standard_normal(d))
            lower = float(rng.normal(scale=0.5))
            anchor = QuadraticAnchor(float(10.0 ** rng.uniform(-1, 1)), rng.standard_normal(d))
            model = ClippedAffineModel(affine, lower)
            u = clipped_affine_abs_prox(affine, lower, anchor)

            rebased = affine.rebase(anchor.center)
            norm = float(np.linalg.norm(rebased.slope))
            reach = abs(rebased.offset - lower) / max(norm, 1e-12) + 1.0 / anchor.weight * norm + 1e-9
            _, best = scalar_oracle(
                lambda s: np.maximum(rebased.offset + norm * s, lower) + 0.5 * anchor.weight * s**2,
                -reach,
                reach,
            )
            self.assertAlmostEqual(objective(model, anchor, u), best, delta=TOLERANCE)

    def test_below_the_clip_stays_at_center(self):
        anchor = QuadraticAnchor(1.0, np.zeros(2))
        u = clipped_affine_abs_prox(AffineAbsModel(-1.0, np.ones(2), np.zeros(2)), 0.0, anchor)

        assert_array_equal(u, anchor.center)


class TestLinearModelProx(unittest.TestCase):
    def test_gradient_step(self):
        rng = np.random.default_rng(3)
        for _ in range(INSTANCES):
            d = int(rng.integers(1, 5))
            model = LinearModel(float(rng.normal()), rng.standard_normal(d), rng.standard_normal(d))
            anchor = QuadraticAnchor(float(10.0 ** rng.uniform(-1, 1)), rng.standard_normal(d))
            u = linear_model_prox(model, anchor)

            # stationarity of the strongly convex objective
            assert_allclose(model.slope + anchor.weight * (u - anchor.center), 0.0, atol=1e-10)


class TestQuadraticAbsProx(unittest.TestCase):
    def test_matches_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(INSTANCES):
            d = int(rng.integers(1, 5))
            model = QuadraticAbsModel(rng.standard_normal(d), float(rng.normal() + 0.5))
            anchor = QuadraticAnchor(float(10.0 ** rng.uniform(-1, 1.5)), rng.standard_normal(d))
            u = quadratic_abs_prox(model, anchor)

            a, b = model.direction, model.target
            kappa = anchor.weight / float(a @ a)
            v0 = float(a @ anchor.center)
            reach = math.sqrt(2.0 * abs(v0 * v0 - b) / kappa) + 1e-9
            _, best = scalar_oracle(lambda v: np.abs(v * v - b) + 0.5 * kappa * (v - v0) ** 2, v0 - reach, v0 + reach)
            self.assertAlmostEqual(objective(model, anchor, u), best, delta=TOLERANCE)

    def test_tie_breaks_to_the_nonnegative_root(self):
        # v = +1 and v = -1 tie in objective and movement
        model = QuadraticAbsModel(np.array([1.0, 0.0]), 1.0)
        anchor = QuadraticAnchor(1.0, np.zeros(2))
        u = quadratic_abs_prox(model, anchor)

        assert_array_equal(u, [1.0, 0.0])
        self.assertEqual(objective(model, anchor, u), 0.5)

    def test_rejects_zero_direction(self):
        self.assertRaises(ValueError, QuadraticAbsModel, np.zeros(3), 1.0)


class TestBilinearAbsProx(unittest.TestCase):
    def test_matches_oracle(self):
        rng = np.random.default_rng(5)
        for i in range(INSTANCES):
            d1, d2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            target = 0.0 if i % 10 == 0 else float(rng.normal())
            model = BilinearAbsModel(rng.standard_normal(d1), rng.standard_normal(d2), target)
            anchor_x = QuadraticAnchor(float(10.0 ** rng.uniform(-0.5, 1)), rng.standard_normal(d1))
            anchor_y = QuadraticAnchor(float(10.0 ** rng.uniform(-0.5, 1)), rng.standard_normal(d2))
            x, y = bilinear_abs_prox(model, anchor_x, anchor_y)

            value = model.value(np.concatenate([x, y])) + anchor_x.value(x) + anchor_y.value(y)
            left, right = model.left, model.right
            best = bilinear_oracle(
                float(left @ anchor_x.center),
                float(right @ anchor_y.center),
                target,
                anchor_x.weight / float(left @ left),
                anchor_y.weight / float(right @ right),
            )
            self.assertAlmostEqual(value, best, delta=TOLERANCE)

    def test_dispatch_splits_the_stacked_anchor(self):
        rng = np.random.default_rng(6)
        model = BilinearAbsModel(rng.standard_normal(2), rng.standard_normal(3), 0.7)
        anchor = QuadraticAnchor(2.0, rng.standard_normal(5))
        x, y = bilinear_abs_prox(model, *anchor.split(2))

        assert_array_equal(solve_anchored(model, anchor), np.concatenate([x, y]))


class TestSoftThreshold(unittest.TestCase):
    def test_matches_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(INSTANCES):
            v, theta = float(rng.normal(scale=2.0)), float(rng.uniform(0.0, 2.0))
            x_best, _ = scalar_oracle(lambda x: theta * np.abs(x) + 0.5 * (x - v) ** 2, -abs(v) - 1.0, abs(v) + 1.0)
            self.assertAlmostEqual(float(soft_threshold(np.array([v]), theta)[0]), x_best, delta=TOLERANCE)

    def test_nonexpansive(self):
        rng = np.random.default_rng(14)
        for _ in range(INSTANCES):
            u, v = rng.normal(scale=2.0, size=5), rng.normal(scale=2.0, size=5)
            theta = float(rng.uniform(0.0, 2.0))
            gap = np.linalg.norm(soft_threshold(u, theta) - soft_threshold(v, theta))
            self.assertLessEqual(gap, np.linalg.norm(u - v) + 1e-15)

    def test_exact_zeros(self):
        assert_array_equal(soft_threshold(np.array([0.5, -0.5, 2.0]), 1.0), [0.0, 0.0, 1.0])

    def test_rejects_negative_threshold(self):
        self.assertRaises(ValueError, soft_threshold, np.ones(2), -1.0)


class TestLinearL1Prox(unittest.TestCase):
    def test_matches_coordinatewise_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(INSTANCES // 10):
            d = int(rng.integers(2, 6))
            tau = float(rng.uniform(0.0, 1.0))
            model = LinearL1Model(0.3, rng.standard_normal(d), rng.standard_normal(d), tau, d - 1)
            anchor = QuadraticAnchor(float(10.0 ** rng.uniform(-1, 1)), rng.standard_normal(d))
            u = linear_l1_prox(model, anchor)

            for j in range(d):
                g, w, lam = model.gradient[j], anchor.center[j], anchor.weight
                weight = tau if j < d - 1 else 0.0
                reach = abs(w) + (abs(g) + tau) / lam + 1.0
                x_best, _ = scalar_oracle(
                    lambda x: g * x + weight * np.abs(x) + 0.5 * lam * (x - w) ** 2, -reach, reach
                )
                self.assertAlmostEqual(u[j], x_best, delta=TOLERANCE)

    def test_intercept_is_not_shrunk(self):
        model = LinearL1Model(0.0, np.zeros(3), np.zeros(3), 10.0, 2)
        u = linear_l1_prox(model, QuadraticAnchor(1.0, np.array([1.0, -1.0, 1.0])))

        assert_array_equal(u, [0.0, 0.0, 1.0])


class TestSolveAnchored(unittest.TestCase):
    def test_unknown_model_type(self):
        self.assertRaises(TypeError, solve_anchored, object(), QuadraticAnchor(1.0, np.zeros(1)))

    def test_clipped_and_prox_linear_coincide_on_absolute_residuals(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            point, slope = rng.standard_normal(4), rng.standard_normal(4)
            residual = float(rng.normal())
            sign = math.copysign(1.0, residual)
            anchor = QuadraticAnchor(float(10.0 ** rng.uniform(-1, 1)), point)

            linear = solve_anchored(AffineAbsModel(residual, slope, point), anchor)
            clipped = solve_anchored(ClippedAffineModel(AffineAbsModel(abs(residual), sign * slope, point)), anchor)
            assert_array_equal(linear, clipped)


class TestRealRoots(unittest.TestCase):
    def test_quartic(self):
        found = np.sort(real_roots(np.poly([-2.0, -0.5, 1.0, 3.0])))
        assert_allclose(found, [-2.0, -0.5, 1.0, 3.0], atol=1e-10)

    def test_drops_leading_zeros_and_constants(self):
        assert_allclose(real_roots([0.0, 0.0, 2.0, -4.0]), [2.0])
        self.assertEqual(real_roots([5.0]).size, 0)

    def test_bracketed_scan_agrees(self):
        coefficients = np.poly([-1.5, 0.25, 2.0])
        assert_allclose(np.sort(roots.bracketed_roots(coefficients)), [-1.5, 0.25, 2.0], atol=1e-8)

    def test_no_real_roots_uses_fallback(self):
        calls = []
        handler = roots.fallback_used.connect(calls.append)
        try:
            found = real_roots([1.0, 0.0, 1.0])
        finally:
            roots.fallback_used.disconnect(handler)

        self.assertEqual(found.size, 0)
        self.assertEqual(len(calls), 1)
