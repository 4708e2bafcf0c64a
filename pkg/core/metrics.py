"""
Welfare and information at an equilibrium point.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equilibrium import EquilibriumKind, EquilibriumPoint
from .errors import CornerSolutionError
from .model import GameParams, TypeModel, ValueDistribution
from .posterior import type_masses
from .pricing import PricingSolution, discriminatory_price
from .quadrature import integrate_interval


@dataclass(frozen=True)
class MetricsRow:
    consumer_surplus: float
    cs_period2: float
    seller_profit: float
    advertiser_utility: float
    mi_bits: float
    posterior_gap: float
    cs_derivative: Optional[float] = None


def prob_ad_a(eq: EquilibriumPoint, dist: ValueDistribution) -> float:
    """Probability that the consumer is shown ad A in period 2."""
    if eq.kind is EquilibriumKind.UNIFORM_A:
        return 1.0
    if eq.kind is EquilibriumKind.UNIFORM_B:
        return 0.0
    F = float(dist.cdf(eq.cutoff))
    return eq.q * (1.0 - F) + (1.0 - eq.q) * F


def purchase_surplus(dist: ValueDistribution, price: float, cutoff: float) -> float:
    """Period-1 surplus: integral of (v - price) f(v) over [cutoff, 1]."""
    return integrate_interval(lambda v: (v - price) * dist.density(v), cutoff, 1.0)


def consumer_surplus(eq: EquilibriumPoint, dist: ValueDistribution, params: GameParams) -> float:
    return purchase_surplus(dist, eq.price, eq.cutoff) + params.delta * prob_ad_a(eq, dist)


def cs_period2(eq: EquilibriumPoint, dist: ValueDistribution, params: GameParams) -> float:
    """The ad bonus part of consumer surplus alone."""
    return params.delta * prob_ad_a(eq, dist)


def seller_profit(eq: EquilibriumPoint, dist: ValueDistribution) -> float:
    return eq.price * (1.0 - float(dist.cdf(eq.cutoff)))


def advertiser_utility(eq: EquilibriumPoint, params: GameParams) -> float:
    pair = eq.posteriors
    if eq.kind is EquilibriumKind.DISCRIMINATORY:
        on_one = pair.r1 * params.s1A + (1.0 - pair.r1) * params.s2A
        on_zero = pair.r0 * params.s1B + (1.0 - pair.r0) * params.s2B
        return pair.p_sig1 * on_one + pair.p_sig0 * on_zero
    prior = min(1.0, max(0.0, pair.prior))
    if eq.kind is EquilibriumKind.UNIFORM_A:
        return prior * params.s1A + (1.0 - prior) * params.s2A
    return prior * params.s1B + (1.0 - prior) * params.s2B


def _xlogx_ratio(p: float, row: float, col: float) -> float:
    if p <= 0.0:
        return 0.0
    return p * math.log2(p / (row * col))


def joint_type_signal(dist: ValueDistribution, g: TypeModel, v_star: float, q: float) -> np.ndarray:
    """2x2 joint law of (type, b_hat); rows t1/t2, columns b_hat=1/0."""
    m = type_masses(dist, g, v_star)
    t2_below = max(0.0, m.cdf - m.below)
    t2_above = max(0.0, (1.0 - m.cdf) - m.above)
    return np.array(
        [
            [(1.0 - q) * m.below + q * m.above, q * m.below + (1.0 - q) * m.above],
            [(1.0 - q) * t2_below + q * t2_above, q * t2_below + (1.0 - q) * t2_above],
        ]
    )


def information_bits(joint: np.ndarray) -> float:
    """Mutual information of a 2x2 joint law, with 0 log 0 := 0."""
    joint = np.clip(np.asarray(joint, dtype=float), 0.0, None)
    joint = joint / joint.sum()
    rows = joint.sum(axis=1)
    cols = joint.sum(axis=0)
    if rows.min() <= 0.0 or cols.min() <= 0.0:
        return 0.0
    total = sum(
        _xlogx_ratio(joint[i, j], rows[i], cols[j])
        for i in range(2)
        for j in range(2)
    )
    return min(1.0, max(0.0, total))


def mutual_information(dist: ValueDistribution, g: TypeModel, v_star: float, q: float) -> float:
    """Bits that b_hat carries about the consumer's type."""
    if math.isnan(q) or not 0.5 <= q <= 1.0:
        raise ValueError(f"q must lie in [1/2, 1], got {q}")
    if q == 0.5:
        return 0.0
    return information_bits(joint_type_signal(dist, g, v_star, q))


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def cs_derivative(
    dist: ValueDistribution,
    params: GameParams,
    q: float,
    solution: Optional[PricingSolution] = None,
) -> float:
    """
    d(CS)/dq along the discriminatory path:
    delta (1 - 2F(v*)) - p1'(q) (1 - F(v*)).
    """
    if solution is None:
        solution = discriminatory_price(dist, params.delta, q)
    if solution.corner_flag:
        raise CornerSolutionError(f"cs_derivative needs an interior solution (q={q:.6g} is an all-buy corner)")
    F = float(dist.cdf(solution.v_star))
    return params.delta * (1.0 - 2.0 * F) - solution.p1_derivative * (1.0 - F)


def metrics_row(eq: EquilibriumPoint, dist: ValueDistribution, g: TypeModel, params: GameParams) -> MetricsRow:
    derivative = None
    if eq.kind is EquilibriumKind.DISCRIMINATORY and eq.pricing is not None and not eq.pricing.corner_flag:
        derivative = cs_derivative(dist, params, eq.q, eq.pricing)
    return MetricsRow(
        consumer_surplus=consumer_surplus(eq, dist, params),
        cs_period2=cs_period2(eq, dist, params),
        seller_profit=seller_profit(eq, dist),
        advertiser_utility=advertiser_utility(eq, params),
        mi_bits=mutual_information(dist, g, eq.cutoff, eq.q),
        posterior_gap=eq.posteriors.gap,
        cs_derivative=derivative,
    )


def consumer_utility(eq: EquilibriumPoint, v, params: GameParams):
    """Expected two-period utility of a consumer with value v who best-responds to eq."""
    v = np.asarray(v, dtype=float)
    if eq.kind is EquilibriumKind.DISCRIMINATORY:
        buy = (v - eq.price) + eq.q * params.delta
        skip = (1.0 - eq.q) * params.delta
        out = np.maximum(buy, skip)
    else:
        bonus = params.delta if eq.kind is EquilibriumKind.UNIFORM_A else 0.0
        out = np.maximum(v - eq.price, 0.0) + bonus
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PreferenceSplit:
    values: np.ndarray
    prefer_first: np.ndarray
    prefer_second: np.ndarray

    @property
    def share_first(self) -> float:
        return float(self.prefer_first.mean())

    @property
    def share_second(self) -> float:
        return float(self.prefer_second.mean())

    def all_prefer_first(self) -> bool:
        return bool(self.prefer_first.all())

    def all_prefer_second(self) -> bool:
        return bool(self.prefer_second.all())


def preference_split(
    first: EquilibriumPoint,
    second: EquilibriumPoint,
    params: GameParams,
    grid: int = 1001,
    tol: float = 1e-12,
) -> PreferenceSplit:
    """Which consumer values strictly prefer each of two equilibria at the same q."""
    values = np.linspace(0.0, 1.0, grid)
    diff = consumer_utility(first, values, params) - consumer_utility(second, values, params)
    return PreferenceSplit(values=values, prefer_first=diff > tol, prefer_second=diff < -tol)
