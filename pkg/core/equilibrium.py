"""
Equilibrium classification.

Three pure-strategy kinds are possible at a fidelity q:

    discriminatory  seller charges p1(q), consumers cut at v*(q),
                    advertiser shows A on b_hat=1 and B on b_hat=0
                    holds iff r1(v*, q) >= eta and r0(v*, q) <= eta
    uniform_A       seller charges p_m, advertiser always shows A
                    holds iff r0(p_m, q) >= eta
    uniform_B       seller charges p_m, advertiser always shows B
                    holds iff r1(p_m, q) <= eta

Comparisons use the tie tolerance ETA_TIE_TOL; ties set boundary_flag.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .model import AdvertiserStrategy, GameModel, GameParams, TypeModel, ValueDistribution
from .posterior import PosteriorPair, path_posterior, posterior
from .pricing import PricingSolution, cutoff_path, discriminatory_price, monopoly_price

ETA_TIE_TOL = 1e-9
DEFAULT_GRID = 513
BOUNDARY_TOL = 1e-7
CERTIFICATE_GRID = 1001


def _log(prefix: str, msg: str):
    print(f"[{prefix}] {msg}")


class EquilibriumKind(str, Enum):
    DISCRIMINATORY = "discriminatory"
    UNIFORM_A = "uniform_A"
    UNIFORM_B = "uniform_B"

    @property
    def strategy(self) -> AdvertiserStrategy:
        return {
            EquilibriumKind.DISCRIMINATORY: AdvertiserStrategy.DISCRIMINATORY,
            EquilibriumKind.UNIFORM_A: AdvertiserStrategy.ALWAYS_A,
            EquilibriumKind.UNIFORM_B: AdvertiserStrategy.ALWAYS_B,
        }[self]

    @property
    def order(self) -> int:
        return list(EquilibriumKind).index(self)


@dataclass(frozen=True)
class EquilibriumPoint:
    kind: EquilibriumKind
    q: float
    price: float
    cutoff: float
    posteriors: PosteriorPair
    boundary_flag: bool = False
    pricing: Optional[PricingSolution] = None

    @property
    def strategy(self) -> AdvertiserStrategy:
        return self.kind.strategy

    def slack(self, eta: float) -> float:
        """Distance of the binding posterior from eta; negative when the kind fails."""
        return _slack(self.kind, self.posteriors, eta)


@dataclass(frozen=True)
class ExistenceBoundary:
    kind: EquilibriumKind
    q_bar: float
    side: str
    entire_interval: bool = False


def _slack(kind: EquilibriumKind, pair: PosteriorPair, eta: float) -> float:
    if kind is EquilibriumKind.DISCRIMINATORY:
        return min(pair.r1 - eta, eta - pair.r0)
    if kind is EquilibriumKind.UNIFORM_A:
        return pair.r0 - eta
    return eta - pair.r1


def holds(kind: EquilibriumKind, pair: PosteriorPair, eta: float, tol: float = ETA_TIE_TOL) -> bool:
    return _slack(kind, pair, eta) >= -tol


def _is_tie(kind: EquilibriumKind, pair: PosteriorPair, eta: float, tol: float) -> bool:
    if kind is EquilibriumKind.DISCRIMINATORY:
        return abs(pair.r1 - eta) <= tol or abs(pair.r0 - eta) <= tol
    if kind is EquilibriumKind.UNIFORM_A:
        return abs(pair.r0 - eta) <= tol
    return abs(pair.r1 - eta) <= tol


def candidate(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    q: float,
    kind: EquilibriumKind,
    p_m: Optional[float] = None,
) -> EquilibriumPoint:
    """Profile of the given kind at q, built without checking that it is an equilibrium."""
    if p_m is None:
        p_m = monopoly_price(dist)
    kind = EquilibriumKind(kind)
    if kind is EquilibriumKind.DISCRIMINATORY:
        solution = discriminatory_price(dist, params.delta, q, p_m)
        pair = path_posterior(dist, g, cutoff_path(dist, params.delta, p_m), q)
        tie = _is_tie(kind, pair, params.eta, ETA_TIE_TOL)
        return EquilibriumPoint(kind, q, solution.p1, solution.v_star, pair, tie, solution)
    pair = posterior(dist, g, p_m, q)
    return EquilibriumPoint(kind, q, p_m, p_m, pair, _is_tie(kind, pair, params.eta, ETA_TIE_TOL))


def classify(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    q: float,
    p_m: Optional[float] = None,
    tol: float = ETA_TIE_TOL,
) -> List[EquilibriumPoint]:
    """
    Every equilibrium kind that exists at q, in kind order.

    The uniform kinds are evaluated at the monopoly cutoff, the
    discriminatory kind along its own price path. When both uniform
    conditions hold the posterior ties with eta; neither uniform kind is
    returned then, and the discriminatory point carries boundary_flag.
    """
    if math.isnan(q) or not 0.5 <= q <= 1.0:
        raise ValueError(f"q must lie in [1/2, 1], got {q}")
    if p_m is None:
        p_m = monopoly_price(dist)
    eta = params.eta

    found: List[EquilibriumPoint] = []
    uniform_pair = posterior(dist, g, p_m, q)
    uniform_a = holds(EquilibriumKind.UNIFORM_A, uniform_pair, eta, tol)
    uniform_b = holds(EquilibriumKind.UNIFORM_B, uniform_pair, eta, tol)
    if uniform_a and uniform_b:
        uniform_a = uniform_b = False

    disc = candidate(dist, g, params, q, EquilibriumKind.DISCRIMINATORY, p_m)
    if holds(EquilibriumKind.DISCRIMINATORY, disc.posteriors, eta, tol):
        found.append(disc)
    for kind, ok in ((EquilibriumKind.UNIFORM_A, uniform_a), (EquilibriumKind.UNIFORM_B, uniform_b)):
        if ok:
            found.append(EquilibriumPoint(kind, q, p_m, p_m, uniform_pair, _is_tie(kind, uniform_pair, eta, tol)))
    return found


def classify_model(model: GameModel, q: float, p_m: Optional[float] = None) -> List[EquilibriumPoint]:
    return classify(model.dist, model.g, model.params, q, p_m)


def uniform_boundary(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    kind: EquilibriumKind,
    p_m: Optional[float] = None,
) -> Optional[ExistenceBoundary]:
    """
    Largest q at which the uniform kind still exists.

    Returns None when the prior ties eta (neither uniform kind exists at 1/2).
    r0 is non-increasing and r1 non-decreasing in q at a fixed cutoff, so the
    binding quantity crosses zero at most once.
    """
    kind = EquilibriumKind(kind)
    if kind is EquilibriumKind.DISCRIMINATORY:
        raise ValueError("uniform_boundary needs a uniform kind")
    if p_m is None:
        p_m = monopoly_price(dist)
    eta = params.eta
    start = posterior(dist, g, p_m, 0.5)
    prior = start.r1
    if abs(prior - eta) <= ETA_TIE_TOL:
        return None
    if kind is EquilibriumKind.UNIFORM_A and prior < eta:
        raise ValueError(f"uniform_A needs prior > eta at q=1/2 (prior={prior:.6g}, eta={eta:.6g})")
    if kind is EquilibriumKind.UNIFORM_B and prior > eta:
        raise ValueError(f"uniform_B needs prior < eta at q=1/2 (prior={prior:.6g}, eta={eta:.6g})")

    side = "r0" if kind is EquilibriumKind.UNIFORM_A else "r1"

    def binding(q: float) -> float:
        return _slack(kind, posterior(dist, g, p_m, q), eta)

    if binding(1.0) >= -ETA_TIE_TOL:
        return ExistenceBoundary(kind, 1.0, side, entire_interval=True)
    q_bar = optimize.brentq(binding, 0.5, 1.0, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)
    return ExistenceBoundary(kind, float(q_bar), side)


def _disc_slack(dist, g, params, p_m, path, q: float) -> float:
    pair = path_posterior(dist, g, path, q)
    return _slack(EquilibriumKind.DISCRIMINATORY, pair, params.eta)


def _refine(predicate, inside: float, outside: float, tol: float) -> float:
    """Bisect between a point where predicate holds and one where it fails; returns the holding side."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if predicate(mid):
            inside = mid
        else:
            outside = mid
    return inside


def discriminatory_intervals(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    resolution: int = DEFAULT_GRID,
    workers: int = 1,
    tol: float = BOUNDARY_TOL,
    p_m: Optional[float] = None,
    logger_prefix: str = "PrivAd_Equilibrium",
    quiet: bool = True,
) -> List[Tuple[float, float]]:
    """Maximal closed q-intervals on which a discriminatory equilibrium exists."""
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    if p_m is None:
        p_m = monopoly_price(dist)
    path = cutoff_path(dist, params.delta, p_m)
    grid = np.linspace(0.5, 1.0, resolution)

    def slack(q: float) -> float:
        return _disc_slack(dist, g, params, p_m, path, float(q))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            slacks = list(pool.map(slack, grid))
    else:
        slacks = [slack(q) for q in grid]
    ok = [s >= -ETA_TIE_TOL for s in slacks]

    def predicate(q: float) -> bool:
        return slack(q) >= -ETA_TIE_TOL

    intervals: List[Tuple[float, float]] = []
    start: Optional[float] = None
    for i, q in enumerate(grid):
        if ok[i] and start is None:
            start = float(q) if i == 0 else _refine(predicate, float(q), float(grid[i - 1]), tol)
        if ok[i] and (i == len(grid) - 1 or not ok[i + 1]):
            end = float(q) if i == len(grid) - 1 else _refine(predicate, float(q), float(grid[i + 1]), tol)
            intervals.append((start, end))
            start = None

    if not quiet:
        shown = ", ".join(f"[{a:.6f}, {b:.6f}]" for a, b in intervals) or "none"
        _log(logger_prefix, f"discriminatory intervals (grid={resolution}, eta={params.eta:.6g}): {shown}")
    return intervals


def regions(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    qs: Sequence[float],
    workers: int = 1,
    p_m: Optional[float] = None,
) -> List[List[EquilibriumPoint]]:
    """classify over a grid; results keep the order of qs."""
    if p_m is None:
        p_m = monopoly_price(dist)

    def one(q: float) -> List[EquilibriumPoint]:
        return classify(dist, g, params, float(q), p_m)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, qs))
    return [one(q) for q in qs]


@dataclass(frozen=True)
class CutoffCertificate:
    cutoff: float
    upper_interval: bool
    consistent: bool
    grid_size: int

    @property
    def ok(self) -> bool:
        return self.upper_interval and self.consistent


def purchase_gain(params: GameParams, strategy: AdvertiserStrategy, price: float, q: float, v):
    """Utility of buying minus utility of not buying for a consumer of value v."""
    v = np.asarray(v, dtype=float)
    if strategy is AdvertiserStrategy.DISCRIMINATORY:
        return (v - price) + q * params.delta - (1.0 - q) * params.delta
    # Under a uniform ad the period-2 bonus does not depend on the purchase.
    return v - price


def best_response_cutoff(
    params: GameParams,
    strategy: AdvertiserStrategy,
    price: float,
    q: float,
    grid_size: int = CERTIFICATE_GRID,
) -> CutoffCertificate:
    """
    Consumer cutoff against a price and an ad rule, with a grid certificate
    that the buy set {v : buying is weakly better} is an upper interval
    bounded by the cutoff.
    """
    if not price >= 0:
        raise ValueError(f"price must be >= 0, got {price}")
    strategy = AdvertiserStrategy(strategy)
    if strategy is AdvertiserStrategy.DISCRIMINATORY:
        raw = price + (1.0 - 2.0 * q) * params.delta
    else:
        raw = price
    cutoff = min(1.0, max(0.0, raw))

    values = np.linspace(0.0, 1.0, grid_size)
    buys = purchase_gain(params, strategy, price, q, values) >= -1e-12
    upper_interval = bool(np.all(np.diff(buys.astype(np.int8)) >= 0))
    # Grid points strictly on either side of the cutoff must agree with it.
    margin = 1e-9
    above = values > cutoff + margin
    below = values < cutoff - margin
    consistent = bool(np.all(buys[above]) and not np.any(buys[below]))
    return CutoffCertificate(cutoff, upper_interval, consistent, grid_size)
