"""
Advertiser posteriors.

For a cutoff v* and fidelity q the advertiser sees b_hat and updates its
belief that the consumer is of type t1:

    r(1) = [(1-q) F a1 + q (1-F) a2] / [(1-q) F + q (1-F)]
    r(0) = [q F a1 + (1-q) (1-F) a2] / [q F + (1-q) (1-F)]

with F = F(v*), a1 the mean of g below the cutoff and a2 the mean above it.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

from .model import TypeModel, ValueDistribution
from .quadrature import integrate_interval

# Signal probabilities below this are treated as zero-probability signals.
SIGNAL_TOL = 1e-12
PATH_LIMIT_STEP = 1e-6


@dataclass(frozen=True)
class PosteriorPair:
    r1: float
    r0: float
    alpha1: float
    alpha2: float
    p_sig1: float
    p_sig0: float
    limit_flag: bool = False

    @property
    def gap(self) -> float:
        return max(0.0, self.r1 - self.r0)

    @property
    def prior(self) -> float:
        """Law of total probability over the two signals."""
        return self.p_sig1 * self.r1 + self.p_sig0 * self.r0


@dataclass(frozen=True)
class TypeMasses:
    """F(v*), the t1 mass below the cutoff and the t1 mass above it."""

    cdf: float
    below: float
    above: float


def type_masses(
    dist: ValueDistribution,
    g: TypeModel,
    v_star: float,
    limit: Optional[int] = None,
) -> TypeMasses:
    if not 0.0 <= v_star <= 1.0 or math.isnan(v_star):
        raise ValueError(f"v_star must lie in [0, 1], got {v_star}")

    def integrand(v):
        return g.g(v) * dist.density(v)

    below = integrate_interval(integrand, 0.0, v_star, g.breakpoints, limit)
    above = integrate_interval(integrand, v_star, 1.0, g.breakpoints, limit)
    return TypeMasses(cdf=float(dist.cdf(v_star)), below=below, above=above)


def _mix(w_low: float, alpha1: float, alpha2: float) -> float:
    value = w_low * alpha1 + (1.0 - w_low) * alpha2
    return min(alpha2, max(alpha1, value))


def posterior(
    dist: ValueDistribution,
    g: TypeModel,
    v_star: float,
    q: float,
    limit: Optional[int] = None,
    extended: bool = False,
) -> PosteriorPair:
    """
    Posterior pair at cutoff v_star and fidelity q.

    extended=True admits q in [0, 1/2) so that the reflection
    r0(q) = r1(1 - q) can be evaluated. A zero-probability signal gets the
    fixed-cutoff limit (the mean of g over the side that carries all mass)
    and limit_flag is set.
    """
    q_low = 0.0 if extended else 0.5
    if math.isnan(q) or not q_low <= q <= 1.0:
        raise ValueError(f"q must lie in [{q_low}, 1], got {q}")
    masses = type_masses(dist, g, v_star, limit)
    F = masses.cdf
    alpha1 = masses.below / F if F > 0 else float(g.g(0.0))
    alpha2 = masses.above / (1.0 - F) if F < 1 else float(g.g(1.0))
    alpha1 = min(1.0, max(0.0, alpha1))
    alpha2 = min(1.0, max(alpha1, alpha2))

    p_sig1 = (1.0 - q) * F + q * (1.0 - F)
    p_sig0 = q * F + (1.0 - q) * (1.0 - F)
    fallback = alpha2 if F < 0.5 else alpha1
    limit_flag = False

    if p_sig1 < SIGNAL_TOL:
        r1 = fallback
        limit_flag = True
    else:
        r1 = _mix((1.0 - q) * F / p_sig1, alpha1, alpha2)
    if p_sig0 < SIGNAL_TOL:
        r0 = fallback
        limit_flag = True
    else:
        r0 = _mix(q * F / p_sig0, alpha1, alpha2)

    return PosteriorPair(
        r1=r1,
        r0=r0,
        alpha1=alpha1,
        alpha2=alpha2,
        p_sig1=p_sig1,
        p_sig0=1.0 - p_sig1,
        limit_flag=limit_flag,
    )


def posterior_gap(
    dist: ValueDistribution,
    g: TypeModel,
    v_star: float,
    q: float,
    limit: Optional[int] = None,
) -> float:
    """r1 - r0, clipped at zero for rounding."""
    return posterior(dist, g, v_star, q, limit).gap


def path_posterior(
    dist: ValueDistribution,
    g: TypeModel,
    cutoff_of_q: Callable[[float], float],
    q: float,
    h: float = PATH_LIMIT_STEP,
    limit: Optional[int] = None,
) -> PosteriorPair:
    """
    Posterior along an equilibrium path q -> (cutoff_of_q(q), q).

    A zero-probability signal is replaced by the path limit, extrapolated
    linearly from q - h and q - 2h (q + h and q + 2h near q = 1/2).
    """
    pair = posterior(dist, g, cutoff_of_q(q), q, limit)
    if not pair.limit_flag:
        return pair
    step = -h if q - 2.0 * h >= 0.5 else h
    near = posterior(dist, g, cutoff_of_q(q + step), q + step, limit)
    far = posterior(dist, g, cutoff_of_q(q + 2.0 * step), q + 2.0 * step, limit)

    def extrapolate(a: float, b: float) -> float:
        return min(1.0, max(0.0, 2.0 * a - b))

    r1, r0 = pair.r1, pair.r0
    if pair.p_sig1 < SIGNAL_TOL:
        r1 = extrapolate(near.r1, far.r1)
    if pair.p_sig0 < SIGNAL_TOL:
        r0 = extrapolate(near.r0, far.r0)
    return replace(pair, r1=r1, r0=r0)


def reflection_residual(dist: ValueDistribution, g: TypeModel, v_star: float, q: float) -> Tuple[float, float]:
    """(r0(q), r1(1 - q)); equal for any q in [0, 1]."""
    left = posterior(dist, g, v_star, q, extended=True).r0
    right = posterior(dist, g, v_star, 1.0 - q, extended=True).r1
    return left, right
