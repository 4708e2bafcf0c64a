"""
Property suite behind `verify`.

Each check returns a PropertyResult; an exception inside a check is a
failure of that check, not of the suite.
"""

import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import numpy as np

from core.equilibrium import (
    EquilibriumKind,
    best_response_cutoff,
    candidate,
    classify,
    holds,
    uniform_boundary,
)
from core.metrics import (
    advertiser_utility,
    binary_entropy,
    consumer_surplus,
    cs_derivative,
    mutual_information,
    seller_profit,
)
from core.model import AdvertiserStrategy, GameModel
from core.oracle import StrategyProfile, agreement, analytic_values, simulate
from core.posterior import path_posterior, posterior, reflection_residual
from core.pricing import cutoff_path, discriminatory_price, monopoly_price, revenue
from core.presets import step_uniform_a_threshold, step_uniform_b_threshold

from .sweep_table import build_sweep, read_csv, revalidate, write_csv

DEFAULT_GRID = 101
ORACLE_QS = (0.5, 0.7, 0.9, 1.0)
ORACLE_N = 1_000_000
# every analytic value must sit within this many standard errors
ORACLE_MAX_Z = 3.0


def _log(prefix: str, msg: str):
    print(f"[{prefix}] {msg}")


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str


class VerifySuite:
    def __init__(
        self,
        model: GameModel,
        grid: int = DEFAULT_GRID,
        oracle_n: int = ORACLE_N,
        oracle_seed: int = 12345,
        workers: int = 1,
        logger_prefix: str = "PrivAd_Verify",
        quiet: bool = True,
    ):
        self.model = model
        self.dist, self.g, self.params = model.dist, model.g, model.params
        self.qs = [float(q) for q in np.linspace(0.5, 1.0, grid)]
        self.oracle_n = oracle_n
        self.oracle_seed = oracle_seed
        self.workers = workers
        self.logger_prefix = logger_prefix
        self.quiet = quiet
        self.p_m = monopoly_price(self.dist)
        self.path = cutoff_path(self.dist, self.params.delta, self.p_m)
        self.prior = model.prior_t1()
        self._classified = None

    def _log(self, msg: str):
        if not self.quiet:
            _log(self.logger_prefix, msg)

    def classified(self):
        if self._classified is None:
            self._classified = [classify(self.dist, self.g, self.params, q, self.p_m) for q in self.qs]
        return self._classified

    def checks(self) -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
        return [
            ("posterior_monotone_in_q", self.check_posterior_monotone),
            ("posterior_reflection", self.check_reflection),
            ("signal_ordering", self.check_signal_ordering),
            ("total_probability", self.check_total_probability),
            ("price_monotone_in_q", self.check_price_monotone),
            ("price_ordering", self.check_price_ordering),
            ("revenue_optimality", self.check_revenue_optimality),
            ("price_slope", self.check_price_slope),
            ("uniform_exclusive", self.check_uniform_exclusive),
            ("cutoff_certificate", self.check_cutoff_certificate),
            ("equilibrium_self_check", self.check_self_consistency),
            ("coexistence_orderings", self.check_coexistence),
            ("advertiser_prefers_discrimination", self.check_advertiser_preference),
            ("cs_derivative_matches_difference", self.check_cs_derivative),
            ("information_bounds", self.check_information_bounds),
            ("step_uniform_threshold", self.check_step_threshold),
            ("sweep_csv_round_trip", self.check_round_trip),
            ("oracle_agreement", self.check_oracle),
        ]

    def run(self) -> List[PropertyResult]:
        results = []
        for name, check in self.checks():
            try:
                passed, detail = check()
            except Exception as e:
                passed, detail = False, f"{type(e).__name__}: {e}"
            self._log(f"{name}: {'PASS' if passed else 'FAIL'} {detail}")
            results.append(PropertyResult(name, passed, detail))
        return results

    # ---- posterior ----

    def check_posterior_monotone(self):
        qs = np.linspace(0.5, 1.0, 101)
        for v_star in (0.25, self.p_m, 0.75):
            pairs = [posterior(self.dist, self.g, v_star, float(q)) for q in qs]
            r1 = np.array([p.r1 for p in pairs])
            r0 = np.array([p.r0 for p in pairs])
            if np.any(np.diff(r1) < -1e-10) or np.any(np.diff(r0) > 1e-10):
                return False, f"not monotone at v*={v_star:.6g}"
        return True, "r1 up, r0 down in q at v* in {0.25, p_m, 0.75}"

    def check_reflection(self):
        worst = 0.0
        for v_star in (0.25, self.p_m):
            for q in np.linspace(0.0, 1.0, 11):
                left, right = reflection_residual(self.dist, self.g, v_star, float(q))
                worst = max(worst, abs(left - right))
        return worst <= 1e-10, f"max |r0(q) - r1(1-q)| = {worst:.3g}"

    def check_signal_ordering(self):
        worst = min(path_posterior(self.dist, self.g, self.path, q).gap for q in self.qs)
        return worst >= 0.0, f"min r1 - r0 on path = {worst:.3g}"

    def check_total_probability(self):
        worst = 0.0
        for q in self.qs:
            pair = posterior(self.dist, self.g, self.path(q), q)
            worst = max(worst, abs(pair.prior - self.prior))
        return worst <= 1e-10, f"max |p1 r1 + p0 r0 - prior| = {worst:.3g}"

    # ---- pricing ----

    def _solutions(self):
        return [discriminatory_price(self.dist, self.params.delta, q, self.p_m) for q in self.qs]

    def check_price_monotone(self):
        sols = self._solutions()
        p1 = np.array([s.p1 for s in sols])
        vs = np.array([s.v_star for s in sols])
        ok = np.all(np.diff(p1) >= -1e-10) and np.all(np.diff(vs) <= 1e-10)
        return bool(ok), f"p1 in [{p1.min():.6g}, {p1.max():.6g}], v* in [{vs.min():.6g}, {vs.max():.6g}]"

    def check_price_ordering(self):
        bad = [s.q for s in self._solutions() if not (s.v_star <= self.p_m + 1e-10 and self.p_m <= s.p1 + 1e-10)]
        return not bad, "v* <= p_m <= p1" if not bad else f"violated at q={bad[0]:.6g}"

    def check_revenue_optimality(self):
        delta = self.params.delta
        for q in (0.5, 0.75, 1.0):
            sol = discriminatory_price(self.dist, delta, q, self.p_m)
            prices = np.linspace(0.0, 1.0 + (2.0 * q - 1.0) * delta, 100_001)
            cutoffs = np.clip(prices + (1.0 - 2.0 * q) * delta, 0.0, 1.0)
            best = float(np.max(prices * (1.0 - np.asarray(self.dist.cdf(cutoffs)))))
            got = revenue(self.dist, sol.p1, delta, q)
            if got < best - 1e-6:
                return False, f"q={q}: revenue {got:.9g} below grid max {best:.9g}"
        return True, "FOC price beats a brute-force price grid"

    def _interior_qs(self, h: float) -> List[float]:
        out = []
        for q in np.linspace(0.5, 1.0, 23)[1:-1]:
            q = float(q)
            lo = discriminatory_price(self.dist, self.params.delta, q - h, self.p_m)
            hi = discriminatory_price(self.dist, self.params.delta, q + h, self.p_m)
            if lo.v_star > 1e-3 and hi.v_star > 1e-3:
                out.append(q)
        return out

    def check_price_slope(self):
        h = 1e-5
        worst = 0.0
        for q in self._interior_qs(h):
            sol = discriminatory_price(self.dist, self.params.delta, q, self.p_m)
            up = discriminatory_price(self.dist, self.params.delta, q + h, self.p_m).p1
            down = discriminatory_price(self.dist, self.params.delta, q - h, self.p_m).p1
            worst = max(worst, abs(sol.p1_derivative - (up - down) / (2 * h)))
        return worst <= 1e-5, f"max |p1' - finite difference| = {worst:.3g}"

    # ---- equilibrium ----

    def check_uniform_exclusive(self):
        for q, found in zip(self.qs, self.classified()):
            kinds = {eq.kind for eq in found}
            if {EquilibriumKind.UNIFORM_A, EquilibriumKind.UNIFORM_B} <= kinds:
                return False, f"both uniform kinds at q={q:.6g}"
        at_half = {eq.kind for eq in self.classified()[0]}
        eta = self.params.eta
        if abs(self.prior - eta) <= 1e-9:
            expected = set()
        else:
            expected = {EquilibriumKind.UNIFORM_A if self.prior > eta else EquilibriumKind.UNIFORM_B}
        uniform_at_half = at_half - {EquilibriumKind.DISCRIMINATORY}
        if uniform_at_half != expected:
            return False, f"q=1/2 uniform kinds {sorted(k.value for k in uniform_at_half)}"
        return True, f"prior={self.prior:.6g} eta={eta:.6g}"

    def check_cutoff_certificate(self):
        for strategy in AdvertiserStrategy:
            for price in (0.0, 0.3, self.p_m, 0.9, 1.2):
                for q in (0.5, 0.75, 1.0):
                    cert = best_response_cutoff(self.params, strategy, price, q)
                    if not cert.ok:
                        return False, f"{strategy.value} price={price:.6g} q={q}"
        return True, "buy sets are upper intervals for all three ad rules"

    def check_self_consistency(self):
        eta = self.params.eta
        for q, found in zip(self.qs, self.classified()):
            for eq in found:
                if not holds(eq.kind, eq.posteriors, eta):
                    return False, f"{eq.kind.value} at q={q:.6g} fails its condition"
                if eq.posteriors.limit_flag:
                    continue
                fresh = posterior(self.dist, self.g, eq.cutoff, q)
                if abs(fresh.r1 - eq.posteriors.r1) > 1e-10 or abs(fresh.r0 - eq.posteriors.r0) > 1e-10:
                    return False, f"{eq.kind.value} at q={q:.6g} does not reproduce its posteriors"
        return True, "every classified point reproduces its conditions"

    def _coexisting(self):
        for q, found in zip(self.qs, self.classified()):
            by_kind = {eq.kind: eq for eq in found}
            disc = by_kind.get(EquilibriumKind.DISCRIMINATORY)
            if disc is None:
                continue
            for kind in (EquilibriumKind.UNIFORM_A, EquilibriumKind.UNIFORM_B):
                if kind in by_kind:
                    yield q, disc, by_kind[kind]

    def check_coexistence(self):
        count = 0
        for q, disc, uniform in self._coexisting():
            count += 1
            cs_d = consumer_surplus(disc, self.dist, self.params)
            cs_u = consumer_surplus(uniform, self.dist, self.params)
            if uniform.kind is EquilibriumKind.UNIFORM_A:
                if q == 0.5:
                    continue
                if not (cs_u > cs_d and seller_profit(disc, self.dist) > seller_profit(uniform, self.dist)):
                    return False, f"uniform_A orderings fail at q={q:.6g}"
                if not (disc.price > self.p_m and disc.cutoff < self.p_m):
                    return False, f"price/cutoff ordering fails at q={q:.6g}"
            elif cs_d < cs_u - 1e-12:
                return False, f"uniform_B ordering fails at q={q:.6g}"
        return True, f"{count} coexisting grid points"

    def check_advertiser_preference(self):
        for q, disc, uniform in self._coexisting():
            if advertiser_utility(disc, self.params) < advertiser_utility(uniform, self.params) - 1e-12:
                return False, f"advertiser prefers {uniform.kind.value} at q={q:.6g}"
        return True, "discrimination weakly preferred wherever it coexists"

    # ---- metrics ----

    def _cs_on_path(self, q: float) -> float:
        eq = candidate(self.dist, self.g, self.params, q, EquilibriumKind.DISCRIMINATORY, self.p_m)
        return consumer_surplus(eq, self.dist, self.params)

    def check_cs_derivative(self):
        h = 1e-4
        worst = 0.0
        for q in self._interior_qs(h):
            analytic = cs_derivative(self.dist, self.params, q)
            numeric = (self._cs_on_path(q + h) - self._cs_on_path(q - h)) / (2 * h)
            worst = max(worst, abs(analytic - numeric))
        return worst <= 1e-6, f"max |dCS/dq - finite difference| = {worst:.3g}"

    def check_information_bounds(self):
        if mutual_information(self.dist, self.g, self.p_m, 0.5) != 0.0:
            return False, "mutual information non-zero at q=1/2"
        for q in self.qs:
            pair = posterior(self.dist, self.g, self.path(q), q)
            mi = mutual_information(self.dist, self.g, self.path(q), q)
            if mi < 0 or mi > binary_entropy(pair.p_sig1) + 1e-12:
                return False, f"mi={mi:.6g} out of bounds at q={q:.6g}"
        return True, "0 <= mi <= H(p_sig1)"

    def check_step_threshold(self):
        delta, eta = self.params.delta, self.params.eta
        t = dict(self.g.params).get("step_threshold")
        if self.dist.kind != "uniform" or self.g.kind != "step" or delta >= 1 or abs(t - (1 - delta) / 2) > 1e-12:
            return True, "not applicable"
        if abs(self.prior - eta) <= 1e-9:
            return True, "prior ties eta"
        if self.prior > eta:
            bound = uniform_boundary(self.dist, self.g, self.params, EquilibriumKind.UNIFORM_A, self.p_m)
            expected = min(1.0, step_uniform_a_threshold(eta, delta))
        else:
            bound = uniform_boundary(self.dist, self.g, self.params, EquilibriumKind.UNIFORM_B, self.p_m)
            expected = min(1.0, step_uniform_b_threshold(eta, delta))
        got = bound.q_bar
        return abs(got - expected) <= 1e-9, f"boundary {got:.9g} vs closed form {expected:.9g}"

    def check_round_trip(self):
        table = build_sweep(self.model, self.qs[::5], quiet=True)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_csv(table, Path(tmp) / "sweep.csv")
            reread = read_csv(path)
        problems = revalidate(reread, self.model)
        for old, new in zip(table.rows, reread.rows):
            for column in ("price", "cutoff", "r1", "r0", "cs", "profit", "adv_utility", "mi_bits"):
                a, b = getattr(old, column), getattr(new, column)
                if (a is None) != (b is None) or (a is not None and abs(a - b) > 1e-9):
                    problems.append(f"{column} at q={old.q:.6g}")
        return not problems, "re-read table reproduces classify" if not problems else problems[0]

    # ---- oracle ----

    def check_oracle(self, qs: Optional[List[float]] = None):
        scores, score_qs = [], []
        for q in qs or ORACLE_QS:
            for eq in classify(self.dist, self.g, self.params, q, self.p_m):
                report = simulate(
                    self.dist, self.g, self.params, q, StrategyProfile.from_equilibrium(eq),
                    self.oracle_n, self.oracle_seed, workers=self.workers,
                )
                found = agreement(report, analytic_values(eq, self.dist, self.g, self.params))
                scores.extend(found)
                score_qs.extend([q] * len(found))
        if not scores:
            return True, "no equilibria at the oracle points"
        worst = max(s.z for s in scores)
        outside = [f"{s.name}@q={q:g}" for q, s in zip(score_qs, scores) if not s.z <= ORACLE_MAX_Z]
        detail = f"{len(scores)} comparisons, max z={worst:.2f}"
        if outside:
            detail += f", beyond {ORACLE_MAX_Z:g} SE: {', '.join(outside)}"
        return not outside, detail
