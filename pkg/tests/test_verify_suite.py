import unittest
from unittest.mock import patch

from commands import verify_suite
from commands.verify_suite import PropertyResult, VerifySuite
from core.oracle import Agreement
from core.presets import get_preset


class StepSuiteMixin:
    PRESET = ""
    GRID = 21

    @classmethod
    def setUpClass(cls):
        # small oracle sample: the strict 3-SE band is covered at n=10^6 in the oracle tests
        suite = VerifySuite(get_preset(cls.PRESET), grid=cls.GRID, oracle_n=20_000, oracle_seed=12345)
        cls.results = {r.name: r for r in suite.run()}

    def test_every_analytic_property_holds(self):
        self.assertEqual(len(self.results), 18)
        failed = {name: r.detail for name, r in self.results.items() if not r.passed and name != "oracle_agreement"}
        self.assertEqual(failed, {})
        self.assertIn("comparisons", self.results["oracle_agreement"].detail)

    def test_step_threshold_is_checked(self):
        self.assertNotEqual(self.results["step_uniform_threshold"].detail, "not applicable")

    def test_coexistence_was_exercised(self):
        self.assertNotEqual(self.results["coexistence_orderings"].detail, "0 coexisting grid points")
        self.assertTrue(self.results["coexistence_orderings"].passed)


class CoexistenceSuiteTests(StepSuiteMixin, unittest.TestCase):
    PRESET = "step_coexist_a"


class UniformBCoexistenceSuiteTests(StepSuiteMixin, unittest.TestCase):
    PRESET = "step_coexist_b"
    GRID = 41

    def test_four_grid_points_coexist(self):
        self.assertEqual(self.results["coexistence_orderings"].detail, "4 coexisting grid points")


class SelectedChecksTests(unittest.TestCase):
    def test_smooth_checks_on_truncated_exponential(self):
        suite = VerifySuite(get_preset("trunc_exp_b"), grid=21)
        for check in (
            suite.check_total_probability,
            suite.check_price_slope,
            suite.check_cs_derivative,
            suite.check_information_bounds,
            suite.check_uniform_exclusive,
        ):
            with self.subTest(check=check.__name__):
                passed, detail = check()
                self.assertTrue(passed, detail)

    def test_one_value_beyond_three_standard_errors_fails_the_oracle(self):
        suite = VerifySuite(get_preset("uniform_eta50"), grid=11, oracle_n=1_000)
        scores = [Agreement("r1", 0.5, 0.5, 0.01, 0.2), Agreement("r0", 0.3, 0.335, 0.01, 3.5)]
        with patch.object(verify_suite, "agreement", return_value=scores):
            passed, detail = suite.check_oracle([0.75])
        self.assertFalse(passed)
        self.assertIn("max z=3.50", detail)
        self.assertIn("r0@q=0.75", detail)

        with patch.object(verify_suite, "agreement", return_value=scores[:1]):
            passed, _ = suite.check_oracle([0.75])
        self.assertTrue(passed)

    def test_exception_inside_a_check_is_a_failure(self):
        suite = VerifySuite(get_preset("uniform_eta50"), grid=11)

        def broken():
            raise ZeroDivisionError("division by zero")

        with patch.object(suite, "checks", return_value=[("broken", broken)]):
            results = suite.run()
        self.assertEqual(results, [PropertyResult("broken", False, "ZeroDivisionError: division by zero")])


if __name__ == "__main__":
    unittest.main()
