"""
Game primitives: buyer-value distributions, type models, advertiser payoffs,
privacy levels and the randomized-response channel.

All objects are immutable. Distribution and type-model maps accept floats or
numpy arrays; custom maps must do the same.

Standing assumptions checked by validate():
  - hazard f/(1-F) non-decreasing (inverse hazard non-increasing)
  - g(v) = Pr(t1 | v) non-decreasing
  - delta > 0, s1A > s1B, s2B > s2A
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .errors import ModelValidationError
from .quadrature import integrate_interval

DEFAULT_VALIDATION_GRID = 1024
# Relative tolerance for grid monotonicity and identity checks.
GRID_TOL = 1e-9


def _as_float(value):
    """Return a python float for 0-d results, the array otherwise."""
    arr = np.asarray(value, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


# ---------------------------------------------------------------------------
# Privacy level
# ---------------------------------------------------------------------------

def q_from_epsilon(epsilon: float) -> float:
    """Channel fidelity q = e^eps / (1 + e^eps); eps = inf maps to exactly 1."""
    epsilon = float(epsilon)
    if math.isnan(epsilon) or epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if math.isinf(epsilon):
        return 1.0
    return 1.0 / (1.0 + math.exp(-epsilon))


def epsilon_from_q(q: float) -> float:
    """Inverse of q_from_epsilon: eps = ln(q / (1 - q)); q = 1 maps to inf."""
    q = float(q)
    if math.isnan(q) or q < 0.5 or q > 1.0:
        raise ValueError(f"q must lie in [1/2, 1], got {q}")
    if q == 1.0:
        return math.inf
    if q == 0.5:
        return 0.0
    return math.log(q) - math.log1p(-q)


@dataclass(frozen=True)
class PrivacyLevel:
    """A fidelity q in [1/2, 1] together with its epsilon-DP equivalent."""

    q: float
    epsilon: float

    @classmethod
    def from_q(cls, q: float) -> "PrivacyLevel":
        return cls(q=float(q), epsilon=epsilon_from_q(q))

    @classmethod
    def from_epsilon(cls, epsilon: float) -> "PrivacyLevel":
        return cls(q=q_from_epsilon(epsilon), epsilon=float(epsilon))

    @property
    def is_full_privacy(self) -> bool:
        return self.q == 0.5

    @property
    def is_no_privacy(self) -> bool:
        return math.isinf(self.epsilon)


# ---------------------------------------------------------------------------
# Signal channel and strategies
# ---------------------------------------------------------------------------

class Ad(str, Enum):
    A = "A"
    B = "B"


class ConsumerType(str, Enum):
    T1 = "t1"
    T2 = "t2"


class AdvertiserStrategy(str, Enum):
    """The three admissible advertiser strategies (map from reported bit to ad)."""

    DISCRIMINATORY = "discriminatory"  # 1 -> A, 0 -> B
    ALWAYS_A = "always_A"
    ALWAYS_B = "always_B"

    def ad_for(self, reported_bit: int) -> Ad:
        if self is AdvertiserStrategy.ALWAYS_A:
            return Ad.A
        if self is AdvertiserStrategy.ALWAYS_B:
            return Ad.B
        return Ad.A if reported_bit == 1 else Ad.B

    def shows_a(self, reported_bits):
        """Vectorized ad rule: True where ad A is shown."""
        bits = np.asarray(reported_bits)
        if self is AdvertiserStrategy.ALWAYS_A:
            return np.ones(bits.shape, dtype=bool)
        if self is AdvertiserStrategy.ALWAYS_B:
            return np.zeros(bits.shape, dtype=bool)
        return bits == 1


@dataclass(frozen=True)
class SignalChannel:
    """Symmetric randomized response: reports the purchase bit with probability q."""

    q: float

    def __post_init__(self):
        if not 0.5 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [1/2, 1], got {self.q}")

    def likelihood(self, reported_bit: int, purchase_bit: int) -> float:
        """Pr[b_hat = reported_bit | b = purchase_bit]."""
        return self.q if reported_bit == purchase_bit else 1.0 - self.q

    def transmit(self, purchase_bits, rng: np.random.Generator):
        """Flip each bit independently with probability 1 - q."""
        bits = np.asarray(purchase_bits, dtype=np.int8)
        flips = rng.random(bits.shape) >= self.q
        return np.where(flips, 1 - bits, bits).astype(np.int8)


# ---------------------------------------------------------------------------
# Value distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValueDistribution:
    """
    Buyer-value law F on [0, 1].

    kind is one of "uniform", "trunc_exp", "power", "custom". Built-in kinds
    carry closed-form cdf, density, inverse hazard and quantile maps; custom
    kinds derive the inverse hazard from cdf/density and sample by bisection.
    """

    kind: str
    params: Tuple[Tuple[str, float], ...]
    _cdf: Callable = field(repr=False, compare=False)
    _density: Callable = field(repr=False, compare=False)
    _inverse_hazard: Optional[Callable] = field(default=None, repr=False, compare=False)
    _ppf: Optional[Callable] = field(default=None, repr=False, compare=False)

    # ---- constructors ----

    @classmethod
    def uniform(cls) -> "ValueDistribution":
        return cls(
            kind="uniform",
            params=(),
            _cdf=lambda v: np.clip(v, 0.0, 1.0),
            _density=lambda v: np.where((np.asarray(v) >= 0) & (np.asarray(v) <= 1), 1.0, 0.0),
            _inverse_hazard=lambda v: 1.0 - np.clip(v, 0.0, 1.0),
            _ppf=lambda u: np.asarray(u, dtype=float),
        )

    @classmethod
    def trunc_exp(cls, lam: float) -> "ValueDistribution":
        """
        Exponential law truncated and renormalized to [0, 1]:
        f(v) = lam e^{lam v} / (e^lam - 1).

        lam > 0 gives an increasing density, lam < 0 the decaying (ordinary
        exponential) shape. Both have a non-decreasing hazard.
        """
        lam = float(lam)
        if lam == 0 or not math.isfinite(lam):
            raise ValueError(f"trunc_exp rate must be finite and non-zero, got {lam}")
        norm = math.expm1(lam)

        def cdf(v):
            return np.expm1(lam * np.clip(v, 0.0, 1.0)) / norm

        def density(v):
            v = np.asarray(v, dtype=float)
            inside = (v >= 0) & (v <= 1)
            return np.where(inside, lam * np.exp(lam * np.clip(v, 0.0, 1.0)) / norm, 0.0)

        def inverse_hazard(v):
            return np.expm1(lam * (1.0 - np.clip(v, 0.0, 1.0))) / lam

        def ppf(u):
            return np.log1p(np.asarray(u, dtype=float) * norm) / lam

        return cls("trunc_exp", (("lambda", lam),), cdf, density, inverse_hazard, ppf)

    @classmethod
    def power(cls, k: float) -> "ValueDistribution":
        """F(v) = v^k on [0, 1]."""
        k = float(k)
        if k <= 0 or not math.isfinite(k):
            raise ValueError(f"power exponent must be positive, got {k}")

        def cdf(v):
            return np.power(np.clip(v, 0.0, 1.0), k)

        def density(v):
            v = np.asarray(v, dtype=float)
            with np.errstate(divide="ignore"):
                d = k * np.power(np.clip(v, 0.0, 1.0), k - 1.0)
            return np.where((v >= 0) & (v <= 1), d, 0.0)

        def inverse_hazard(v):
            v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = (1.0 - np.power(v, k)) / (k * np.power(v, k - 1.0))
            return np.where(np.isnan(out), np.inf, out)

        def ppf(u):
            return np.power(np.asarray(u, dtype=float), 1.0 / k)

        return cls("power", (("power_k", k),), cdf, density, inverse_hazard, ppf)

    @classmethod
    def custom(cls, cdf: Callable, density: Callable, name: str = "custom") -> "ValueDistribution":
        """Black-box law; absolutely continuous with positive density on (0,1) is assumed."""
        return cls("custom", (("name", name),), cdf, density)

    # ---- evaluation ----

    @property
    def param_dict(self) -> Dict[str, float]:
        return dict(self.params)

    def cdf(self, v):
        return _as_float(self._cdf(v))

    def density(self, v):
        return _as_float(self._density(v))

    def inverse_hazard(self, v):
        """I(v) = (1 - F(v)) / f(v); inf where the density vanishes."""
        if self._inverse_hazard is not None:
            return _as_float(self._inverse_hazard(v))
        survival = 1.0 - np.asarray(self._cdf(v), dtype=float)
        dens = np.asarray(self._density(v), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(dens > 0, survival / np.where(dens > 0, dens, 1.0), np.inf)
        return _as_float(out)

    def inverse_hazard_slope(self, v: float, h: float = 1e-6) -> float:
        """I'(v) by central difference; one-sided at the support edges."""
        lo = max(0.0, v - h)
        hi = min(1.0, v + h)
        return (self.inverse_hazard(hi) - self.inverse_hazard(lo)) / (hi - lo)

    def ppf(self, u, tol: float = 1e-12):
        """Quantile map; bisection on the cdf when no closed form exists."""
        if self._ppf is not None:
            return _as_float(np.clip(self._ppf(u), 0.0, 1.0))
        u = np.asarray(u, dtype=float)
        lo = np.zeros_like(u)
        hi = np.ones_like(u)
        iterations = int(math.ceil(math.log2(1.0 / tol))) + 1
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self._cdf(mid), dtype=float) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return _as_float(0.5 * (lo + hi))

    def describe(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.kind}({args})"


# ---------------------------------------------------------------------------
# Type models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeModel:
    """g(v) = Pr(type t1 | value v)."""

    kind: str
    params: Tuple[Tuple[str, float], ...]
    _g: Callable = field(repr=False, compare=False)
    breakpoints: Tuple[float, ...] = ()

    @classmethod
    def identity(cls) -> "TypeModel":
        return cls("identity", (), lambda v: np.clip(v, 0.0, 1.0))

    @classmethod
    def step(cls, threshold: float) -> "TypeModel":
        """0 at or below threshold, 1 above it."""
        threshold = float(threshold)
        if not 0.0 <= threshold <= 1.0:
            raise ValueError(f"step threshold must lie in [0, 1], got {threshold}")
        return cls(
            "step",
            (("step_threshold", threshold),),
            lambda v: np.where(np.asarray(v) > threshold, 1.0, 0.0),
            (threshold,),
        )

    @classmethod
    def affine(cls, a: float, b: float) -> "TypeModel":
        """g(v) = a + b v; validate() reports values leaving [0, 1]."""
        a, b = float(a), float(b)
        return cls("affine", (("affine_a", a), ("affine_b", b)), lambda v: a + b * np.asarray(v, dtype=float))

    @classmethod
    def custom(cls, g: Callable, name: str = "custom", breakpoints: Tuple[float, ...] = ()) -> "TypeModel":
        return cls("custom", (("name", name),), g, tuple(breakpoints))

    def g(self, v):
        return _as_float(self._g(v))

    def describe(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.kind}({args})"


# ---------------------------------------------------------------------------
# Payoffs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GameParams:
    """Consumer bonus delta for ad A and the advertiser's four payoffs."""

    delta: float
    s1A: float
    s2A: float
    s1B: float
    s2B: float

    @property
    def eta(self) -> float:
        """Posterior on t1 above which ad A is the advertiser's best response."""
        denom = self.s1A - self.s2A - self.s1B + self.s2B
        if denom == 0:
            return math.nan
        return (self.s2B - self.s2A) / denom

    def payoff(self, ad: Ad, consumer_type: ConsumerType) -> float:
        if ad is Ad.A:
            return self.s1A if consumer_type is ConsumerType.T1 else self.s2A
        return self.s1B if consumer_type is ConsumerType.T1 else self.s2B

    def expected_payoff(self, ad: Ad, r: float) -> float:
        """Advertiser payoff of showing ad to a consumer who is t1 with probability r."""
        return r * self.payoff(ad, ConsumerType.T1) + (1.0 - r) * self.payoff(ad, ConsumerType.T2)

    @classmethod
    def with_eta(cls, delta: float, eta: float) -> "GameParams":
        """Payoffs s1A = 1 - eta, s2B = eta, s2A = s1B = 0, which give exactly this eta."""
        return cls(delta=float(delta), s1A=1.0 - eta, s2A=0.0, s1B=0.0, s2B=float(eta))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    check: str
    point: Optional[float]
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    grid_size: int
    violations: Tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def checks_failed(self) -> List[str]:
        return sorted({v.check for v in self.violations})

    def summary(self) -> str:
        if self.ok:
            return f"pass (grid={self.grid_size})"
        first = {}
        for v in self.violations:
            first.setdefault(v.check, v)
        parts = [
            f"{name} at v={item.point:.6g}: {item.detail}" if item.point is not None else f"{name}: {item.detail}"
            for name, item in first.items()
        ]
        return "; ".join(parts)


def _first_bad(grid: np.ndarray, mask: np.ndarray) -> Optional[float]:
    idx = np.flatnonzero(mask)
    return float(grid[idx[0]]) if idx.size else None


def validate(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    n: int = DEFAULT_VALIDATION_GRID,
) -> ValidationReport:
    """Check the standing assumptions on an n-point grid over [0, 1]."""
    if n < 3:
        raise ValueError(f"validation grid needs at least 3 points, got {n}")
    grid = np.linspace(0.0, 1.0, n)
    interior = grid[1:-1]
    found: List[Violation] = []

    def flag(check: str, point: Optional[float], detail: str):
        found.append(Violation(check, point, detail))

    cdf = np.asarray(dist.cdf(grid), dtype=float)
    if abs(cdf[0]) > GRID_TOL:
        flag("cdf_endpoints", 0.0, f"cdf(0)={cdf[0]:.3g}")
    if abs(cdf[-1] - 1.0) > GRID_TOL:
        flag("cdf_endpoints", 1.0, f"cdf(1)={cdf[-1]:.12g}")
    steps = np.diff(cdf)
    bad = steps < -GRID_TOL
    if bad.any():
        flag("cdf_monotone", _first_bad(grid[1:], bad), "cdf decreases")

    dens = np.asarray(dist.density(interior), dtype=float)
    bad = ~(dens >= 0)
    if bad.any():
        flag("density_nonnegative", _first_bad(interior, bad), "negative or undefined density")

    ih = np.asarray(dist.inverse_hazard(interior), dtype=float)
    finite = np.isfinite(ih)
    ih_f = ih[finite]
    pts_f = interior[finite]
    if ih_f.size > 1:
        rises = np.diff(ih_f) > GRID_TOL * np.maximum(1.0, np.abs(ih_f[:-1]))
        if rises.any():
            flag("hazard_monotone", _first_bad(pts_f[1:], rises), "hazard rate decreases (inverse hazard rises)")
    survival = 1.0 - cdf[1:-1]
    with np.errstate(invalid="ignore"):
        mismatch = np.abs(ih * dens - survival) > 1e-7 * np.maximum(1.0, survival)
    mismatch &= finite
    if mismatch.any():
        flag("inverse_hazard_identity", _first_bad(interior, mismatch), "I(v) f(v) != 1 - F(v)")

    gv = np.asarray(g.g(grid), dtype=float)
    bad = (gv < -GRID_TOL) | (gv > 1.0 + GRID_TOL) | np.isnan(gv)
    if bad.any():
        flag("type_range", _first_bad(grid, bad), "g(v) outside [0, 1]")
    bad = np.diff(gv) < -GRID_TOL
    if bad.any():
        flag("type_monotone", _first_bad(grid[1:], bad), "g decreases")

    if not params.delta > 0:
        flag("delta_positive", None, f"delta={params.delta}")
    if not params.s1A > params.s1B:
        flag("payoff_order", None, f"s1A={params.s1A} must exceed s1B={params.s1B}")
    if not params.s2B > params.s2A:
        flag("payoff_order", None, f"s2B={params.s2B} must exceed s2A={params.s2A}")
    eta = params.eta
    if not 0.0 < eta < 1.0:
        flag("eta_range", None, f"eta={eta}")

    return ValidationReport(grid_size=n, violations=tuple(found))


def require_valid(dist: ValueDistribution, g: TypeModel, params: GameParams, n: int = DEFAULT_VALIDATION_GRID) -> ValidationReport:
    report = validate(dist, g, params, n)
    if not report.ok:
        raise ModelValidationError(report)
    return report


def prior_t1(dist: ValueDistribution, g: TypeModel, limit: Optional[int] = None) -> float:
    """Prior probability of type t1: integral of g f over [0, 1]."""
    value = integrate_interval(
        lambda v: g.g(v) * dist.density(v),
        0.0,
        1.0,
        breakpoints=g.breakpoints,
        limit=limit,
    )
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class GameModel:
    """A complete game: value law, type model and payoffs."""

    dist: ValueDistribution
    g: TypeModel
    params: GameParams
    name: str = "custom"

    @property
    def eta(self) -> float:
        return self.params.eta

    def validate(self, n: int = DEFAULT_VALIDATION_GRID) -> ValidationReport:
        return validate(self.dist, self.g, self.params, n)

    def prior_t1(self) -> float:
        return prior_t1(self.dist, self.g)

    def describe(self) -> str:
        p = self.params
        return (
            f"{self.name}: F={self.dist.describe()} g={self.g.describe()} delta={p.delta:g} "
            f"s1A={p.s1A:g} s2A={p.s2A:g} s1B={p.s1B:g} s2B={p.s2B:g} eta={p.eta:.6g}"
        )
