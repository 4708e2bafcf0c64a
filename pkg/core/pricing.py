"""
Seller's period-1 problem.

monopoly_price:        root of p - I(p) = 0 on (0, 1)
discriminatory_price:  root of p - I(p + (1-2q) delta) = 0, with the
                       all-buy corner when the cutoff would drop below 0
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import RootBracketError
from .model import ValueDistribution

ROOT_XTOL = 1e-13
ROOT_RTOL = 4 * np.finfo(float).eps
ROOT_MAXITER = 200
# I(v) is infinite where the density vanishes; the FOC only needs its sign.
INVERSE_HAZARD_CAP = 1e6
CORNER_TOL = 1e-9
SLOPE_STEP = 1e-6


@dataclass(frozen=True)
class PricingSolution:
    q: float
    delta: float
    p_m: float
    p1: float
    v_star: float
    corner_flag: bool
    p1_derivative: float


def _capped_inverse_hazard(dist: ValueDistribution, v: float) -> float:
    v = min(1.0, max(0.0, v))
    value = float(dist.inverse_hazard(v))
    if math.isnan(value):
        return 0.0 if v >= 1.0 else INVERSE_HAZARD_CAP
    return min(value, INVERSE_HAZARD_CAP)


def _brentq(func: Callable[[float], float], lo: float, hi: float, what: str) -> float:
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise RootBracketError(
            f"{what}: no sign change on [{lo:.6g}, {hi:.6g}] "
            f"(f(lo)={f_lo:.3g}, f(hi)={f_hi:.3g})"
        )
    return float(optimize.brentq(func, lo, hi, xtol=ROOT_XTOL, rtol=ROOT_RTOL, maxiter=ROOT_MAXITER))


def monopoly_price(dist: ValueDistribution) -> float:
    """Myopic monopoly price p_m; unique under a non-decreasing hazard."""
    return _brentq(lambda p: p - _capped_inverse_hazard(dist, p), 0.0, 1.0, "monopoly price")


def period1_cutoff(price: float, delta: float, q: float) -> float:
    """Unclamped cutoff p + (1 - 2q) delta of a consumer facing discrimination."""
    return price + (1.0 - 2.0 * q) * delta


def revenue(dist: ValueDistribution, price: float, delta: float, q: float) -> float:
    """Period-1 revenue p (1 - F(cutoff)) with the cutoff clamped to [0, 1]."""
    cutoff = min(1.0, max(0.0, period1_cutoff(price, delta, q)))
    return price * (1.0 - float(dist.cdf(cutoff)))


def price_slope(dist: ValueDistribution, delta: float, v_star: float, h: float = SLOPE_STEP) -> float:
    """dp1/dq = 2 delta I'/(I' - 1) at the cutoff (implicit differentiation of the FOC)."""
    slope = dist.inverse_hazard_slope(v_star, h)
    return 2.0 * delta * slope / (slope - 1.0)


def discriminatory_price(
    dist: ValueDistribution,
    delta: float,
    q: float,
    p_m: Optional[float] = None,
) -> PricingSolution:
    """Seller's price and the induced cutoff under the discriminatory profile."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if math.isnan(q) or not 0.5 <= q <= 1.0:
        raise ValueError(f"q must lie in [1/2, 1], got {q}")
    if p_m is None:
        p_m = monopoly_price(dist)

    shift = (1.0 - 2.0 * q) * delta
    all_buy_price = -shift

    def foc(p: float) -> float:
        return p - _capped_inverse_hazard(dist, p + shift)

    gap = foc(all_buy_price)
    if gap >= 0.0:
        corner = gap > CORNER_TOL
        return PricingSolution(
            q=q,
            delta=delta,
            p_m=p_m,
            p1=all_buy_price,
            v_star=0.0,
            corner_flag=corner,
            p1_derivative=2.0 * delta if corner else price_slope(dist, delta, 0.0),
        )

    p1 = _brentq(foc, all_buy_price, all_buy_price + 1.0, f"discriminatory price at q={q:.6g}")
    v_star = min(1.0, max(0.0, period1_cutoff(p1, delta, q)))
    return PricingSolution(
        q=q,
        delta=delta,
        p_m=p_m,
        p1=p1,
        v_star=v_star,
        corner_flag=False,
        p1_derivative=price_slope(dist, delta, v_star),
    )


def cutoff_path(dist: ValueDistribution, delta: float, p_m: Optional[float] = None) -> Callable[[float], float]:
    """q -> v*(q) along the discriminatory equilibrium path."""
    if p_m is None:
        p_m = monopoly_price(dist)

    def cutoff(q: float) -> float:
        return discriminatory_price(dist, delta, min(1.0, max(0.5, q)), p_m).v_star

    return cutoff
