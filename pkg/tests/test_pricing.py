import math
import unittest

import numpy as np

from core import pricing, presets
from core.errors import RootBracketError
from core.model import ValueDistribution

UNIFORM = ValueDistribution.uniform()


class MonopolyPriceTests(unittest.TestCase):
    def test_known_monopoly_prices(self):
        self.assertAlmostEqual(pricing.monopoly_price(UNIFORM), 0.5, places=12)
        self.assertAlmostEqual(pricing.monopoly_price(ValueDistribution.power(2.0)), 1.0 / math.sqrt(3.0), places=10)
        self.assertAlmostEqual(pricing.monopoly_price(ValueDistribution.trunc_exp(1.0)), 0.557146, places=5)

    def test_missing_sign_change_is_reported(self):
        with self.assertRaises(RootBracketError):
            pricing._brentq(lambda p: 1.0 + p, 0.0, 1.0, "test root")


class DiscriminatoryPriceTests(unittest.TestCase):
    def test_uniform_identity_path(self):
        for q in np.linspace(0.5, 1.0, 11):
            with self.subTest(q=q):
                sol = pricing.discriminatory_price(UNIFORM, 1.0, float(q))
                self.assertAlmostEqual(sol.p1, q, places=10)
                self.assertAlmostEqual(sol.v_star, 1.0 - q, places=10)
                self.assertFalse(sol.corner_flag)

    def test_uniform_closed_form_for_other_delta(self):
        sol = pricing.discriminatory_price(UNIFORM, 0.5, 0.8)
        self.assertAlmostEqual(sol.p1, 0.65, places=10)
        self.assertAlmostEqual(sol.v_star, 0.35, places=10)
        self.assertAlmostEqual(sol.p1, presets.uniform_price_on_path(0.8, 0.5), places=10)
        self.assertAlmostEqual(sol.v_star, presets.uniform_cutoff_on_path(0.8, 0.5), places=10)

    def test_full_privacy_gives_monopoly_price(self):
        sol = pricing.discriminatory_price(ValueDistribution.trunc_exp(1.0), 0.5, 0.5)
        self.assertAlmostEqual(sol.p1, sol.p_m, places=10)
        self.assertAlmostEqual(sol.v_star, sol.p_m, places=10)

    def test_corner_when_everyone_buys(self):
        sol = pricing.discriminatory_price(UNIFORM, 2.0, 1.0)
        self.assertTrue(sol.corner_flag)
        self.assertAlmostEqual(sol.p1, 2.0, places=12)
        self.assertEqual(sol.v_star, 0.0)

    def test_touching_corner_is_not_flagged(self):
        sol = pricing.discriminatory_price(UNIFORM, 1.0, 1.0)
        self.assertFalse(sol.corner_flag)
        self.assertAlmostEqual(sol.p1, 1.0, places=12)

    def test_truncated_exponential_without_privacy(self):
        sol = pricing.discriminatory_price(ValueDistribution.trunc_exp(1.0), 0.5, 1.0)
        self.assertAlmostEqual(sol.p1, 0.8726, places=3)
        self.assertAlmostEqual(sol.v_star, 0.3726, places=3)
        self.assertAlmostEqual(sol.p1 - sol.v_star, 0.5, places=10)

    def test_price_rises_with_q(self):
        for dist in (UNIFORM, ValueDistribution.trunc_exp(-4.0), ValueDistribution.power(2.0)):
            prices = [pricing.discriminatory_price(dist, 0.6, float(q)).p1 for q in np.linspace(0.5, 1.0, 26)]
            with self.subTest(dist=dist.describe()):
                self.assertTrue(np.all(np.diff(prices) > 0))

    def test_price_maximizes_revenue(self):
        dist = ValueDistribution.trunc_exp(1.0)
        for q in (0.55, 0.75, 0.95):
            sol = pricing.discriminatory_price(dist, 0.5, q)
            best = sol.p1 * (1.0 - float(dist.cdf(sol.v_star)))
            grid = np.linspace(0.0, 1.5, 3001)
            with self.subTest(q=q):
                self.assertAlmostEqual(pricing.revenue(dist, sol.p1, 0.5, q), best, places=12)
                self.assertGreaterEqual(best + 1e-9, max(pricing.revenue(dist, float(p), 0.5, q) for p in grid))

    def test_slope_matches_finite_difference(self):
        dist = ValueDistribution.trunc_exp(1.0)
        h = 1e-5
        for q in (0.6, 0.8):
            sol = pricing.discriminatory_price(dist, 0.5, q)
            numeric = (
                pricing.discriminatory_price(dist, 0.5, q + h).p1 - pricing.discriminatory_price(dist, 0.5, q - h).p1
            ) / (2 * h)
            with self.subTest(q=q):
                self.assertAlmostEqual(sol.p1_derivative, numeric, places=5)

    def test_uniform_slope_is_delta_not_two_q(self):
        sol = pricing.discriminatory_price(UNIFORM, 0.7, 0.8)
        self.assertAlmostEqual(sol.p1_derivative, 0.7, places=6)
        self.assertNotAlmostEqual(sol.p1_derivative, 2 * 0.8, places=3)

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            pricing.discriminatory_price(UNIFORM, 1.0, 0.4)
        with self.assertRaises(ValueError):
            pricing.discriminatory_price(UNIFORM, 0.0, 0.7)

    def test_cutoff_path_matches_solver(self):
        path = pricing.cutoff_path(UNIFORM, 0.5)
        self.assertAlmostEqual(path(0.8), 0.35, places=10)
        self.assertAlmostEqual(path(0.5), 0.5, places=10)


if __name__ == "__main__":
    unittest.main()
