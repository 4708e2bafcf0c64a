import math
import unittest
from unittest.mock import patch

from core import equilibrium, oracle
from core.equilibrium import EquilibriumKind
from core.model import AdvertiserStrategy, GameModel, GameParams, TypeModel, ValueDistribution
from core.presets import get_preset


def point(model, q, kind=EquilibriumKind.DISCRIMINATORY):
    return equilibrium.candidate(model.dist, model.g, model.params, q, kind)


def run(model, eq, n, seed, workers=1):
    profile = oracle.StrategyProfile.from_equilibrium(eq)
    return oracle.simulate(model.dist, model.g, model.params, eq.q, profile, n, seed, workers)


class DeterminismTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.model = get_preset("uniform_eta50")
        cls.eq = point(cls.model, 0.75)

    def test_same_seed_same_report(self):
        first = run(self.model, self.eq, 20_000, 7)
        second = run(self.model, self.eq, 20_000, 7)
        self.assertEqual(first.as_dict(), second.as_dict())

    def test_worker_count_does_not_change_results(self):
        with patch.object(oracle, "SHARD_SIZE", 4096):
            serial = run(self.model, self.eq, 20_000, 11, workers=1)
            parallel = run(self.model, self.eq, 20_000, 11, workers=4)
        self.assertEqual(serial.as_dict(), parallel.as_dict())

    def test_different_seeds_differ(self):
        self.assertNotEqual(run(self.model, self.eq, 5_000, 1).r1, run(self.model, self.eq, 5_000, 2).r1)

    def test_rejects_empty_sample(self):
        with self.assertRaises(ValueError):
            run(self.model, self.eq, 0, 1)

    def test_profile_from_equilibrium(self):
        profile = oracle.StrategyProfile.from_equilibrium(self.eq)
        self.assertEqual(profile.ad_rule, AdvertiserStrategy.DISCRIMINATORY)
        self.assertAlmostEqual(profile.price, 0.75, places=10)
        self.assertAlmostEqual(profile.cutoff, 0.25, places=10)


class AgreementTests(unittest.TestCase):
    N = 1_000_000
    SEED = 12345

    def z_scores(self, model, eq, n=N, seed=SEED):
        report = run(model, eq, n, seed)
        analytic = oracle.analytic_values(eq, model.dist, model.g, model.params)
        return report, oracle.agreement(report, analytic)

    def assert_within_band(self, report, name, expected, band=3.0):
        se = report.standard_errors[name]
        self.assertLessEqual(
            abs(report.value(name) - expected), band * se, f"{name}: empirical={report.value(name)} expected={expected}"
        )

    def test_every_equilibrium_within_three_standard_errors(self):
        models = [
            get_preset("uniform_eta50"),
            get_preset("trunc_exp_b"),
            GameModel(ValueDistribution.power(2.0), TypeModel.identity(), GameParams(1.0, 1.0, 0.0, 0.0, 1.0), "power2"),
        ]
        for model in models:
            compared = 0
            for q in (0.5, 0.7, 0.9, 1.0):
                for eq in equilibrium.classify(model.dist, model.g, model.params, q):
                    _, checks = self.z_scores(model, eq)
                    compared += len(checks)
                    for check in checks:
                        with self.subTest(model=model.name, q=q, kind=eq.kind.value, quantity=check.name):
                            self.assertLessEqual(
                                check.z, 3.0, f"analytic={check.analytic} empirical={check.empirical}"
                            )
            with self.subTest(model=model.name):
                self.assertGreaterEqual(compared, 20)

    def test_uniform_identity_posteriors(self):
        model = get_preset("uniform_eta50")
        report, _ = self.z_scores(model, point(model, 0.5))
        self.assert_within_band(report, "r1", 0.5)
        # discriminatory profile p=0.8, v*=0.2
        report, _ = self.z_scores(model, point(model, 0.8))
        self.assert_within_band(report, "r0", 0.35)
        # monopoly cutoff 1/2: r1 = (1+2q)/4, r0 = (3-2q)/4
        report, _ = self.z_scores(model, point(model, 0.8, EquilibriumKind.UNIFORM_A))
        self.assert_within_band(report, "r1", 0.65)
        self.assert_within_band(report, "r0", 0.35)

    def test_step_model_posterior(self):
        model = get_preset("step_coexist_b")
        eq = point(model, 0.8)
        self.assertAlmostEqual(eq.price, 0.77, places=6)
        self.assertAlmostEqual(eq.cutoff, 0.23, places=6)
        report, _ = self.z_scores(model, eq)
        self.assert_within_band(report, "r0", 0.881657)

    def test_uniform_kind_posteriors(self):
        model = get_preset("step_coexist_b")
        eq = point(model, 0.8, EquilibriumKind.UNIFORM_B)
        report, _ = self.z_scores(model, eq)
        self.assert_within_band(report, "r1", eq.posteriors.r1)
        self.assert_within_band(report, "r0", eq.posteriors.r0)

    def test_sample_identities(self):
        model = get_preset("uniform_eta50")
        eq = point(model, 0.75)
        report, _ = self.z_scores(model, eq, n=200_000)
        analytic = oracle.analytic_values(eq, model.dist, model.g, model.params)
        self.assertAlmostEqual(report.mi_bits, analytic["mi_bits"], delta=0.005)
        self.assertAlmostEqual(report.p_sig1 + report.p_sig0, 1.0, places=12)

    def test_zero_probability_signal_is_skipped(self):
        model = get_preset("uniform_eta50")
        eq = point(model, 1.0)
        analytic = oracle.analytic_values(eq, model.dist, model.g, model.params)
        self.assertNotIn("r0", analytic)
        report = run(model, eq, 10_000, 3)
        self.assertTrue(math.isnan(report.r0))
        self.assertNotIn("r0", [a.name for a in oracle.agreement(report, analytic)])


class ConvergenceTests(unittest.TestCase):
    def test_slope_of_square_root_decay(self):
        n_list = [1_000, 10_000, 100_000]
        errors = [1.0 / math.sqrt(n) for n in n_list]
        self.assertAlmostEqual(oracle.convergence_slope(n_list, errors), -0.5, places=12)

    def test_pooled_errors_shrink_like_square_root(self):
        model = get_preset("uniform_eta50")
        eq = point(model, 0.75)
        profile = oracle.StrategyProfile.from_equilibrium(eq)
        analytic = oracle.analytic_values(eq, model.dist, model.g, model.params)
        n_list = [1_000, 10_000, 100_000, 1_000_000]
        summary = oracle.pooled_convergence(
            model.dist, model.g, model.params, 0.75, profile, n_list, range(20), analytic
        )
        self.assertEqual(summary.seeds, 20)
        self.assertEqual(summary.pairs, 20 * len(n_list) * 6)
        self.assertEqual(set(summary.slopes), {"r1", "r0", "p_sig1", "consumer_surplus", "seller_profit", "advertiser_utility"})
        for name, slope in summary.slopes.items():
            with self.subTest(quantity=name):
                self.assertGreaterEqual(slope, -0.65)
                self.assertLessEqual(slope, -0.35)
        self.assertGreaterEqual(summary.coverage, 0.99)

    def test_pooled_needs_seeds(self):
        model = get_preset("uniform_eta50")
        eq = point(model, 0.75)
        profile = oracle.StrategyProfile.from_equilibrium(eq)
        with self.assertRaises(ValueError):
            oracle.pooled_convergence(model.dist, model.g, model.params, 0.75, profile, [1_000], [], {})

    def test_sweep_is_ascending_and_seeded(self):
        model = get_preset("uniform_eta50")
        eq = point(model, 0.75)
        profile = oracle.StrategyProfile.from_equilibrium(eq)
        reports = oracle.convergence_sweep(model.dist, model.g, model.params, 0.75, profile, [1_000, 4_000], 5)
        self.assertEqual([r.n for r in reports], [1_000, 4_000])
        with self.assertRaises(ValueError):
            oracle.convergence_sweep(model.dist, model.g, model.params, 0.75, profile, [4_000, 1_000], 5)


if __name__ == "__main__":
    unittest.main()
