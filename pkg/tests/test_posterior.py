import unittest

import numpy as np

from core import posterior, presets
from core.model import TypeModel, ValueDistribution, prior_t1
from core.pricing import cutoff_path

UNIFORM = ValueDistribution.uniform()
IDENTITY = TypeModel.identity()
Q_GRID = np.linspace(0.5, 1.0, 101)
CLOSED_FORM_TOL = 1e-8


class MonopolyCutoffTests(unittest.TestCase):
    def test_closed_forms_at_monopoly_cutoff(self):
        for q in Q_GRID:
            with self.subTest(q=q):
                pair = posterior.posterior(UNIFORM, IDENTITY, 0.5, float(q))
                self.assertAlmostEqual(pair.r1, presets.identity_r1_at_monopoly(q), delta=CLOSED_FORM_TOL)
                self.assertAlmostEqual(pair.r0, presets.identity_r0_at_monopoly(q), delta=CLOSED_FORM_TOL)
                self.assertFalse(pair.limit_flag)

    def test_full_privacy_returns_prior(self):
        pair = posterior.posterior(UNIFORM, TypeModel.step(0.05), 0.3, 0.5)
        self.assertAlmostEqual(pair.r1, 0.95, places=10)
        self.assertAlmostEqual(pair.r0, 0.95, places=10)
        self.assertEqual(pair.gap, 0.0)

    def test_monotone_in_q_at_fixed_cutoff(self):
        for v_star in (0.2, 0.5, 0.8):
            pairs = [posterior.posterior(UNIFORM, IDENTITY, v_star, float(q)) for q in Q_GRID]
            with self.subTest(v_star=v_star):
                r1 = np.array([p.r1 for p in pairs])
                r0 = np.array([p.r0 for p in pairs])
                self.assertTrue(np.all(np.diff(r1) >= -1e-12))
                self.assertTrue(np.all(np.diff(r0) <= 1e-12))
                self.assertTrue(np.all(r0 <= r1 + 1e-12))

    def test_signal_probabilities_sum_to_one_and_recover_prior(self):
        dist = ValueDistribution.trunc_exp(1.0)
        prior = prior_t1(dist, IDENTITY)
        for v_star in (0.1, 0.55, 0.9):
            for q in (0.5, 0.7, 0.95):
                with self.subTest(v_star=v_star, q=q):
                    pair = posterior.posterior(dist, IDENTITY, v_star, q)
                    self.assertAlmostEqual(pair.p_sig1 + pair.p_sig0, 1.0, places=14)
                    self.assertAlmostEqual(pair.prior, prior, places=9)


class PathTests(unittest.TestCase):
    def test_uniform_identity_path(self):
        for q in Q_GRID[:-1]:
            with self.subTest(q=q):
                pair = posterior.posterior(UNIFORM, IDENTITY, 1.0 - float(q), float(q))
                self.assertAlmostEqual(pair.r1, presets.identity_r1_on_path(q), delta=CLOSED_FORM_TOL)
                self.assertAlmostEqual(pair.r0, presets.identity_r0_on_path(q), delta=CLOSED_FORM_TOL)

    def test_path_posterior_on_the_full_grid(self):
        path = cutoff_path(UNIFORM, 1.0)
        for q in Q_GRID:
            with self.subTest(q=q):
                pair = posterior.path_posterior(UNIFORM, IDENTITY, path, float(q))
                self.assertAlmostEqual(pair.r1, presets.identity_r1_on_path(q), delta=CLOSED_FORM_TOL)
                self.assertAlmostEqual(pair.r0, presets.identity_r0_on_path(q), delta=CLOSED_FORM_TOL)
        self.assertTrue(posterior.path_posterior(UNIFORM, IDENTITY, path, 1.0).limit_flag)

    def test_gap_at_point_eight(self):
        pair = posterior.posterior(UNIFORM, IDENTITY, 0.2, 0.8)
        self.assertAlmostEqual(pair.r1, 0.570588, places=6)
        self.assertAlmostEqual(pair.r0, 0.35, places=9)
        self.assertAlmostEqual(pair.gap, 0.220588, places=6)
        self.assertAlmostEqual(posterior.posterior_gap(UNIFORM, IDENTITY, 0.2, 0.8), 0.220588, places=6)

    def test_step_model_against_closed_form(self):
        g = TypeModel.step(0.05)
        pair = posterior.posterior(UNIFORM, g, 0.23, 0.8)
        self.assertAlmostEqual(pair.r0, 0.881657, places=6)
        self.assertAlmostEqual(pair.r1, 0.984894, places=6)
        self.assertAlmostEqual(pair.r0, presets.step_r0_on_path(0.8, 0.9), places=9)
        self.assertAlmostEqual(pair.r1, presets.step_r1_on_path(0.8, 0.9), places=9)

    def test_zero_probability_signal_uses_limit(self):
        pair = posterior.posterior(UNIFORM, IDENTITY, 0.0, 1.0)
        self.assertTrue(pair.limit_flag)
        self.assertEqual(pair.p_sig0, 0.0)
        self.assertAlmostEqual(pair.r1, 0.5, places=12)

        path = cutoff_path(UNIFORM, 1.0)
        limit = posterior.path_posterior(UNIFORM, IDENTITY, path, 1.0)
        self.assertTrue(limit.limit_flag)
        self.assertAlmostEqual(limit.r0, presets.identity_r0_on_path(1.0), delta=CLOSED_FORM_TOL)
        self.assertAlmostEqual(limit.r1, 0.5, places=12)

    def test_path_posterior_is_plain_posterior_off_the_limit(self):
        path = cutoff_path(UNIFORM, 1.0)
        pair = posterior.path_posterior(UNIFORM, IDENTITY, path, 0.8)
        self.assertAlmostEqual(pair.r1, 0.570588, places=6)
        self.assertFalse(pair.limit_flag)


class ReflectionAndErrorsTests(unittest.TestCase):
    def test_reflection_holds(self):
        for v_star in (0.2, 0.5, 0.7):
            for q in (0.0, 0.3, 0.5, 0.8, 1.0):
                with self.subTest(v_star=v_star, q=q):
                    left, right = posterior.reflection_residual(UNIFORM, IDENTITY, v_star, q)
                    self.assertAlmostEqual(left, right, places=10)

    def test_out_of_range_arguments(self):
        with self.assertRaises(ValueError):
            posterior.posterior(UNIFORM, IDENTITY, 0.5, 0.3)
        with self.assertRaises(ValueError):
            posterior.type_masses(UNIFORM, IDENTITY, 1.2)
        pair = posterior.posterior(UNIFORM, IDENTITY, 0.5, 0.3, extended=True)
        self.assertAlmostEqual(pair.r1, presets.identity_r1_at_monopoly(0.3), places=9)


if __name__ == "__main__":
    unittest.main()
