"""
Monte-Carlo oracle.

Plays the literal game with sampled consumers: values by inverse-cdf
sampling, types from g(v), purchase by cutoff, randomized response on the
purchase bit, ad by the advertiser's rule. Sample statistics are accumulated
per shard; each shard draws from its own child of one SeedSequence, so the
result depends on (seed, n) only and not on the worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .equilibrium import EquilibriumPoint
from .metrics import advertiser_utility, consumer_surplus, information_bits, mutual_information, seller_profit
from .model import AdvertiserStrategy, GameParams, SignalChannel, TypeModel, ValueDistribution

SHARD_SIZE = 1 << 18
QUANTITIES = ("r1", "r0", "p_sig1", "consumer_surplus", "seller_profit", "advertiser_utility", "mi_bits")


def _log(prefix: str, msg: str):
    print(f"[{prefix}] {msg}")


@dataclass(frozen=True)
class StrategyProfile:
    price: float
    cutoff: float
    ad_rule: AdvertiserStrategy

    @classmethod
    def from_equilibrium(cls, eq: EquilibriumPoint) -> "StrategyProfile":
        return cls(price=eq.price, cutoff=eq.cutoff, ad_rule=eq.strategy)


@dataclass
class _ShardStats:
    """Sufficient statistics of one shard."""

    n: int = 0
    # joint counts: [type t1/t2][b_hat 1/0]
    joint: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=np.int64))
    sums: Dict[str, float] = field(default_factory=dict)
    squares: Dict[str, float] = field(default_factory=dict)

    def add_moments(self, name: str, values: np.ndarray):
        self.sums[name] = self.sums.get(name, 0.0) + float(values.sum())
        self.squares[name] = self.squares.get(name, 0.0) + float(np.square(values).sum())

    def merge(self, other: "_ShardStats"):
        self.n += other.n
        self.joint += other.joint
        for name, value in other.sums.items():
            self.sums[name] = self.sums.get(name, 0.0) + value
            self.squares[name] = self.squares.get(name, 0.0) + other.squares[name]


@dataclass(frozen=True)
class SimReport:
    n: int
    seed: int
    q: float
    r1: float
    r0: float
    p_sig1: float
    p_sig0: float
    consumer_surplus: float
    seller_profit: float
    advertiser_utility: float
    mi_bits: float
    standard_errors: Dict[str, float]

    def value(self, name: str) -> float:
        return getattr(self, name)

    def as_dict(self) -> Dict[str, float]:
        out = {name: self.value(name) for name in QUANTITIES}
        out["p_sig0"] = self.p_sig0
        for name, se in self.standard_errors.items():
            out[f"{name}_se"] = se
        return out


def _simulate_shard(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    channel: SignalChannel,
    profile: StrategyProfile,
    size: int,
    seed_seq: np.random.SeedSequence,
) -> _ShardStats:
    rng = np.random.default_rng(seed_seq)
    values = np.asarray(dist.ppf(rng.random(size)), dtype=float)
    is_t1 = rng.random(size) < np.asarray(g.g(values), dtype=float)
    bought = (values >= profile.cutoff).astype(np.int8)
    reported = channel.transmit(bought, rng)
    shows_a = profile.ad_rule.shows_a(reported)

    stats = _ShardStats(n=size)
    sig1 = reported == 1
    stats.joint[0, 0] = int(np.count_nonzero(is_t1 & sig1))
    stats.joint[0, 1] = int(np.count_nonzero(is_t1 & ~sig1))
    stats.joint[1, 0] = int(np.count_nonzero(~is_t1 & sig1))
    stats.joint[1, 1] = int(np.count_nonzero(~is_t1 & ~sig1))

    surplus = np.where(bought == 1, values - profile.price, 0.0) + np.where(shows_a, params.delta, 0.0)
    stats.add_moments("consumer_surplus", surplus)
    stats.add_moments("seller_profit", profile.price * bought)
    payoff = np.where(
        shows_a,
        np.where(is_t1, params.s1A, params.s2A),
        np.where(is_t1, params.s1B, params.s2B),
    )
    stats.add_moments("advertiser_utility", payoff)
    return stats


def _proportion(hits: int, total: int):
    if total == 0:
        return math.nan, math.nan
    p = hits / total
    return p, math.sqrt(p * (1.0 - p) / total)


def _mean(stats: _ShardStats, name: str):
    n = stats.n
    mean = stats.sums[name] / n
    var = max(0.0, stats.squares[name] / n - mean * mean)
    # unbiased variance for the standard error
    if n > 1:
        var *= n / (n - 1)
    return mean, math.sqrt(var / n)


def _information_se(joint: np.ndarray, n: int) -> float:
    """Delta-method standard error of the plug-in mutual information."""
    p = joint / joint.sum()
    rows = p.sum(axis=1, keepdims=True)
    cols = p.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.where(p > 0, np.log2(p / (rows * cols)), 0.0)
    mi = float((p * log_ratio).sum())
    var = float((p * log_ratio ** 2).sum()) - mi * mi
    return math.sqrt(max(0.0, var) / n)


def simulate(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    q: float,
    profile: StrategyProfile,
    n: int,
    seed: int,
    workers: int = 1,
    logger_prefix: str = "PrivAd_Oracle",
    quiet: bool = True,
) -> SimReport:
    """Play the game n times under profile; deterministic given (seed, n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    channel = SignalChannel(q)
    shard_sizes = [SHARD_SIZE] * (n // SHARD_SIZE)
    if n % SHARD_SIZE:
        shard_sizes.append(n % SHARD_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(shard_sizes))
    if not quiet:
        _log(logger_prefix, f"simulate q={q:.6g} rule={profile.ad_rule.value} price={profile.price:.6g} "
                            f"cutoff={profile.cutoff:.6g} n={n} seed={seed} shards={len(shard_sizes)}")

    def run(index: int) -> _ShardStats:
        return _simulate_shard(dist, g, params, channel, profile, shard_sizes[index], children[index])

    if workers > 1 and len(shard_sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(run, range(len(shard_sizes))))
    else:
        shards = [run(i) for i in range(len(shard_sizes))]

    total = _ShardStats()
    for shard in shards:
        total.merge(shard)

    joint = total.joint
    n_sig1 = int(joint[:, 0].sum())
    n_sig0 = int(joint[:, 1].sum())
    r1, r1_se = _proportion(int(joint[0, 0]), n_sig1)
    r0, r0_se = _proportion(int(joint[0, 1]), n_sig0)
    p_sig1, p_sig1_se = _proportion(n_sig1, n)
    cs, cs_se = _mean(total, "consumer_surplus")
    profit, profit_se = _mean(total, "seller_profit")
    adv, adv_se = _mean(total, "advertiser_utility")
    mi = information_bits(joint.astype(float))

    report = SimReport(
        n=n,
        seed=seed,
        q=q,
        r1=r1,
        r0=r0,
        p_sig1=p_sig1,
        p_sig0=n_sig0 / n,
        consumer_surplus=cs,
        seller_profit=profit,
        advertiser_utility=adv,
        mi_bits=mi,
        standard_errors={
            "r1": r1_se,
            "r0": r0_se,
            "p_sig1": p_sig1_se,
            "consumer_surplus": cs_se,
            "seller_profit": profit_se,
            "advertiser_utility": adv_se,
            "mi_bits": _information_se(joint.astype(float), n),
        },
    )
    if not quiet:
        _log(logger_prefix, f"done: r1={r1:.6g} r0={r0:.6g} p_sig1={p_sig1:.6g} cs={cs:.6g}")
    return report


def convergence_sweep(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    q: float,
    profile: StrategyProfile,
    n_list: Sequence[int],
    seed: int,
    workers: int = 1,
) -> List[SimReport]:
    """One report per sample size, all from the same seed."""
    if list(n_list) != sorted(n_list):
        raise ValueError(f"n_list must be ascending, got {list(n_list)}")
    return [simulate(dist, g, params, q, profile, int(n), seed, workers) for n in n_list]


def convergence_slope(n_list: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(n)."""
    x = np.log(np.asarray(n_list, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def analytic_values(eq: EquilibriumPoint, dist: ValueDistribution, g: TypeModel, params: GameParams) -> Dict[str, float]:
    """The closed-form counterparts of a SimReport at an equilibrium point."""
    pair = eq.posteriors
    values = {
        "p_sig1": pair.p_sig1,
        "consumer_surplus": consumer_surplus(eq, dist, params),
        "seller_profit": seller_profit(eq, dist),
        "advertiser_utility": advertiser_utility(eq, params),
        "mi_bits": mutual_information(dist, g, eq.cutoff, eq.q),
    }
    # A posterior on a signal that never fires has no sample counterpart.
    if pair.p_sig1 > 0:
        values["r1"] = pair.r1
    if pair.p_sig0 > 0:
        values["r0"] = pair.r0
    return values


@dataclass(frozen=True)
class Agreement:
    name: str
    analytic: float
    empirical: float
    standard_error: float
    z: float


def agreement(
    report: SimReport,
    analytic: Dict[str, float],
    skip: Sequence[str] = ("mi_bits",),
) -> List[Agreement]:
    """Standardized distance of each analytic value from the sample estimate."""
    out: List[Agreement] = []
    for name in QUANTITIES:
        if name in skip or name not in analytic:
            continue
        empirical = report.value(name)
        se = report.standard_errors[name]
        if math.isnan(empirical):
            continue
        diff = abs(empirical - analytic[name])
        if se > 0:
            z = diff / se
        else:
            z = 0.0 if diff <= 1e-12 else math.inf
        out.append(Agreement(name, analytic[name], empirical, se, z))
    return out


@dataclass(frozen=True)
class ConvergenceSummary:
    """Errors pooled over seeds: RMS per sample size, log-log slopes and band coverage."""

    n_list: Tuple[int, ...]
    seeds: int
    rms_errors: Dict[str, Tuple[float, ...]]
    slopes: Dict[str, float]
    coverage: float
    pairs: int


def pooled_convergence(
    dist: ValueDistribution,
    g: TypeModel,
    params: GameParams,
    q: float,
    profile: StrategyProfile,
    n_list: Sequence[int],
    seeds: Sequence[int],
    analytic: Dict[str, float],
    band_z: float = 3.0,
    skip: Sequence[str] = ("mi_bits",),
    workers: int = 1,
) -> ConvergenceSummary:
    """
    Run convergence_sweep once per seed and pool the errors.

    rms_errors[name][i] is the root mean square of |empirical - analytic|
    over the seeds at n_list[i]; slopes come from convergence_slope on those.
    coverage is the share of (seed, n, quantity) comparisons with z <= band_z.
    """
    if not seeds:
        raise ValueError("seeds must not be empty")
    squared: Dict[str, np.ndarray] = {}
    inside = total = 0
    for seed in seeds:
        reports = convergence_sweep(dist, g, params, q, profile, n_list, int(seed), workers)
        for i, report in enumerate(reports):
            for check in agreement(report, analytic, skip):
                squared.setdefault(check.name, np.zeros(len(n_list)))[i] += (check.empirical - check.analytic) ** 2
                total += 1
                inside += check.z <= band_z
    rms = {name: tuple(float(x) for x in np.sqrt(s / len(seeds))) for name, s in squared.items()}
    slopes = {name: convergence_slope(n_list, errors) for name, errors in rms.items()}
    return ConvergenceSummary(
        n_list=tuple(int(n) for n in n_list),
        seeds=len(seeds),
        rms_errors=rms,
        slopes=slopes,
        coverage=inside / total if total else math.nan,
        pairs=total,
    )
