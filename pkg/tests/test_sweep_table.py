import math
import tempfile
import unittest
from dataclasses import replace
from pathlib import Path
from unittest.mock import patch

import numpy as np

from commands import plots, sweep_table
from commands.sweep_table import ERROR_KIND, NONE_KIND
from core.presets import get_preset


class BuildSweepTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.eta55 = get_preset("uniform_eta55")
        cls.table = sweep_table.build_sweep(cls.eta55, np.linspace(0.5, 1.0, 101), quiet=True)

    def test_existence_sequence(self):
        self.assertEqual(self.table.kind_sequence(), ["uniform_B", "none", "discriminatory", "none"])

    def test_refined_boundaries_are_in_the_grid(self):
        runs = sweep_table.interval_summary(self.table, "uniform_B")
        self.assertEqual(len(runs), 1)
        self.assertAlmostEqual(runs[0][1], 0.6, places=9)
        disc = sweep_table.interval_summary(self.table, "discriminatory")
        self.assertEqual(len(disc), 1)
        self.assertAlmostEqual(disc[0][0], 0.6102, delta=1e-3)
        self.assertAlmostEqual(disc[0][1], 0.8826, delta=1e-3)

    def test_rows_are_in_q_order(self):
        qs = [r.q for r in self.table.rows]
        self.assertEqual(qs, sorted(qs))

    def test_table_agrees_with_classify(self):
        self.assertEqual(sweep_table.revalidate(self.table, self.eta55), [])
        tampered = sweep_table.SweepTable(
            self.table.model_name,
            [replace(r, kind="uniform_A") if r.kind == "uniform_B" else r for r in self.table.rows],
        )
        self.assertTrue(sweep_table.revalidate(tampered, self.eta55))

    def test_no_equilibrium_rows_are_empty(self):
        none_rows = [r for r in self.table.rows if r.kind == NONE_KIND]
        self.assertTrue(none_rows)
        for row in none_rows:
            self.assertFalse(row.exists)
            self.assertIsNone(row.price)
            self.assertEqual(row.as_csv()["price"], "")

    def test_epsilon_columns(self):
        last = self.table.rows[-1]
        self.assertEqual(last.q, 1.0)
        self.assertTrue(last.epsilon_inf)
        self.assertEqual(last.epsilon, sweep_table.EPSILON_CAP)
        first = self.table.rows[0]
        self.assertEqual(first.epsilon, 0.0)
        self.assertFalse(first.epsilon_inf)


class SweepOptionsTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.model = get_preset("uniform_eta50")
        cls.qs = np.linspace(0.5, 1.0, 11)

    def test_workers_do_not_change_rows(self):
        serial = sweep_table.build_sweep(self.model, self.qs, workers=1, refine=False, quiet=True)
        parallel = sweep_table.build_sweep(self.model, self.qs, workers=4, refine=False, quiet=True)
        self.assertEqual(serial.rows, parallel.rows)

    def test_all_kinds_tabulates_candidates(self):
        table = sweep_table.build_sweep(self.model, self.qs, all_kinds=True, refine=False, quiet=True)
        at = table.kinds_at(0.75)
        self.assertEqual(at, ["discriminatory", "uniform_A", "uniform_B"])
        existing = [r.kind for r in table.rows if abs(r.q - 0.75) < 1e-12 and r.exists]
        self.assertEqual(existing, ["discriminatory"])

    def test_preferred_q_for_advertiser(self):
        table = sweep_table.build_sweep(self.model, np.linspace(0.5, 1.0, 201), refine=False, quiet=True)
        best = sweep_table.preferred_q(table, "adv_utility")
        self.assertAlmostEqual(best, 0.5 + math.sqrt(3.0) / 6.0, delta=3e-3)

    def test_skip_error_marks_the_row(self):
        real = sweep_table.sweep_point

        def flaky(model, q, p_m, all_kinds=False):
            if abs(q - 0.75) < 1e-12:
                raise RuntimeError("quadrature blew up")
            return real(model, q, p_m, all_kinds)

        with patch.object(sweep_table, "sweep_point", side_effect=flaky):
            table = sweep_table.build_sweep(self.model, self.qs, refine=False, skip_error=True, quiet=True)
            with self.assertRaises(RuntimeError):
                sweep_table.build_sweep(self.model, self.qs, refine=False, quiet=True)
        errors = [r for r in table.rows if r.kind == ERROR_KIND]
        self.assertEqual(len(errors), 1)
        self.assertEqual(errors[0].error, "quadrature blew up")
        self.assertEqual(len(table.qs()), len(self.qs))


class CsvTests(unittest.TestCase):
    def test_round_trip_keeps_values(self):
        model = get_preset("step_coexist_a")
        table = sweep_table.build_sweep(model, np.linspace(0.9, 1.0, 6), refine=False, quiet=True)
        with tempfile.TemporaryDirectory() as tmp:
            path = sweep_table.write_csv(table, Path(tmp) / "nested" / "sweep.csv")
            header = path.read_text(encoding="utf-8").splitlines()[0].split(",")
            reread = sweep_table.read_csv(path, model.name)
        self.assertEqual(header, sweep_table.CSV_COLUMNS)
        self.assertEqual([r.kind for r in reread.rows], [r.kind for r in table.rows])
        for old, new in zip(table.rows, reread.rows):
            for column in ("q", "price", "cutoff", "r1", "r0", "cs", "cs_period2", "profit", "mi_bits"):
                with self.subTest(q=old.q, column=column):
                    self.assertAlmostEqual(getattr(old, column), getattr(new, column), places=10)
            self.assertEqual(old.exists, new.exists)
            self.assertEqual(old.limit_flag, new.limit_flag)
        self.assertEqual(sweep_table.revalidate(reread, model), [])

    def test_missing_columns_are_rejected(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.csv"
            path.write_text("q,kind\n0.5,none\n", encoding="utf-8")
            with self.assertRaises(ValueError):
                sweep_table.read_csv(path)

    def test_extra_columns(self):
        model = get_preset("uniform_eta50")
        table = sweep_table.build_sweep(model, [0.5, 1.0], refine=False, quiet=True)
        with tempfile.TemporaryDirectory() as tmp:
            path = sweep_table.write_csv(table, Path(tmp) / "x.csv", ["extra"], [{"extra": "a"}, {}])
            lines = path.read_text(encoding="utf-8").splitlines()
        self.assertTrue(lines[0].endswith(",extra"))
        self.assertTrue(lines[1].endswith(",a"))
        self.assertTrue(lines[2].endswith(","))


class PlotTests(unittest.TestCase):
    def test_figures_are_byte_stable(self):
        model = get_preset("uniform_eta55")
        table = sweep_table.build_sweep(model, np.linspace(0.5, 1.0, 21), quiet=True)
        with tempfile.TemporaryDirectory() as tmp:
            first = plots.emit_all(table, Path(tmp) / "a", "eta55", eta=model.eta)
            second = plots.emit_all(table, Path(tmp) / "b", "eta55", eta=model.eta)
            self.assertEqual([p.name for p in first], [f"eta55_{name}.svg" for name in plots.FIGURES])
            for a, b in zip(first, second):
                with self.subTest(figure=a.name):
                    data = a.read_bytes()
                    self.assertTrue(data.startswith(b"<?xml"))
                    self.assertEqual(data, b.read_bytes())

    def test_monopoly_line_without_uniform_rows(self):
        model = get_preset("uniform_eta50")
        table = sweep_table.build_sweep(model, np.linspace(0.5, 1.0, 11), refine=False, quiet=True)
        self.assertAlmostEqual(table.p_m, 0.5, places=9)
        disc_only = sweep_table.SweepTable(
            table.model_name, [r for r in table.rows if r.kind == "discriminatory"], table.p_m
        )
        bare = sweep_table.SweepTable(table.model_name, disc_only.rows)
        with tempfile.TemporaryDirectory() as tmp:
            with_line = plots.plot_prices(disc_only, Path(tmp) / "with.svg").read_bytes()
            without = plots.plot_prices(bare, Path(tmp) / "without.svg").read_bytes()
        self.assertIn(b"p_m", with_line)
        self.assertNotIn(b"p_m", without)


if __name__ == "__main__":
    unittest.main()
