"""
Sweep tables: one row per (q, equilibrium kind), CSV read/write.

Rows with no equilibrium carry kind=none and empty numeric cells; rows for
a grid point that failed under skip_error carry kind=error and the message.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from core.equilibrium import (
    EquilibriumKind,
    EquilibriumPoint,
    candidate,
    classify,
    discriminatory_intervals,
    holds,
    uniform_boundary,
)
from core.metrics import metrics_row
from core.model import GameModel, epsilon_from_q
from core.pricing import monopoly_price

EPSILON_CAP = 36.0
NONE_KIND = "none"
ERROR_KIND = "error"
KIND_ORDER = [k.value for k in EquilibriumKind] + [NONE_KIND, ERROR_KIND]

CSV_COLUMNS = [
    "q", "epsilon", "epsilon_inf", "kind", "price", "cutoff", "r1", "r0",
    "posterior_gap", "cs", "profit", "adv_utility", "mi_bits",
    "boundary_flag", "limit_flag", "cs_period2", "cs_derivative", "exists", "error",
]
_NUMERIC = {
    "price", "cutoff", "r1", "r0", "posterior_gap", "cs", "profit",
    "adv_utility", "mi_bits", "cs_period2", "cs_derivative",
}
_FLAGS = {"epsilon_inf", "boundary_flag", "limit_flag", "exists"}


def _log(prefix: str, msg: str):
    print(f"[{prefix}] {msg}")


def format_number(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.12g}"


@dataclass(frozen=True)
class SweepRow:
    q: float
    epsilon: float
    epsilon_inf: bool
    kind: str
    price: Optional[float] = None
    cutoff: Optional[float] = None
    r1: Optional[float] = None
    r0: Optional[float] = None
    posterior_gap: Optional[float] = None
    cs: Optional[float] = None
    profit: Optional[float] = None
    adv_utility: Optional[float] = None
    mi_bits: Optional[float] = None
    boundary_flag: bool = False
    limit_flag: bool = False
    cs_period2: Optional[float] = None
    cs_derivative: Optional[float] = None
    exists: bool = False
    error: str = ""

    def as_csv(self) -> Dict[str, str]:
        out = {}
        for name, value in asdict(self).items():
            if name in _FLAGS:
                out[name] = "1" if value else "0"
            elif name in ("kind", "error"):
                out[name] = value
            else:
                out[name] = format_number(value)
        return out

    @classmethod
    def from_csv(cls, record: Dict[str, str]) -> "SweepRow":
        kwargs = {}
        for f in fields(cls):
            raw = record.get(f.name, "")
            if f.name in _FLAGS:
                kwargs[f.name] = raw.strip() == "1"
            elif f.name in ("kind", "error"):
                kwargs[f.name] = raw
            elif f.name in _NUMERIC:
                kwargs[f.name] = float(raw) if raw.strip() else None
            else:
                kwargs[f.name] = float(raw)
        return cls(**kwargs)


@dataclass
class SweepTable:
    model_name: str
    rows: List[SweepRow]
    # monopoly price of the value law; None when read back from a CSV
    p_m: Optional[float] = None

    def kinds_at(self, q: float, tol: float = 1e-12) -> List[str]:
        return [r.kind for r in self.rows if abs(r.q - q) <= tol]

    def kind_sequence(self) -> List[str]:
        """Distinct existence states along q, e.g. ['uniform_B', 'none', 'discriminatory', 'none']."""
        states: List[str] = []
        for q in self.qs():
            state = "+".join(sorted(r.kind for r in self.rows if r.q == q and (r.exists or r.kind == NONE_KIND)))
            if not states or states[-1] != state:
                states.append(state)
        return states

    def qs(self) -> List[float]:
        seen: List[float] = []
        for r in self.rows:
            if not seen or seen[-1] != r.q:
                seen.append(r.q)
        return seen

    def rows_of(self, kind: str, existing_only: bool = True) -> List[SweepRow]:
        return [r for r in self.rows if r.kind == kind and (r.exists or not existing_only)]


def _epsilon(q: float):
    eps = epsilon_from_q(q)
    if math.isinf(eps):
        return EPSILON_CAP, True
    return min(eps, EPSILON_CAP), False


def row_from_point(eq: EquilibriumPoint, model: GameModel, exists: bool = True) -> SweepRow:
    m = metrics_row(eq, model.dist, model.g, model.params)
    eps, eps_inf = _epsilon(eq.q)
    return SweepRow(
        q=eq.q,
        epsilon=eps,
        epsilon_inf=eps_inf,
        kind=eq.kind.value,
        price=eq.price,
        cutoff=eq.cutoff,
        r1=eq.posteriors.r1,
        r0=eq.posteriors.r0,
        posterior_gap=m.posterior_gap,
        cs=m.consumer_surplus,
        profit=m.seller_profit,
        adv_utility=m.advertiser_utility,
        mi_bits=m.mi_bits,
        boundary_flag=eq.boundary_flag,
        limit_flag=eq.posteriors.limit_flag,
        cs_period2=m.cs_period2,
        cs_derivative=m.cs_derivative,
        exists=exists,
    )


def marker_row(q: float, kind: str, error: str = "") -> SweepRow:
    eps, eps_inf = _epsilon(q)
    return SweepRow(q=q, epsilon=eps, epsilon_inf=eps_inf, kind=kind, error=error)


def sweep_point(model: GameModel, q: float, p_m: float, all_kinds: bool = False) -> List[SweepRow]:
    """Rows for one grid point: the existing equilibria, or every candidate kind when all_kinds."""
    found = classify(model.dist, model.g, model.params, q, p_m)
    if not all_kinds:
        if not found:
            return [marker_row(q, NONE_KIND)]
        return [row_from_point(eq, model) for eq in found]
    existing = {eq.kind for eq in found}
    rows = []
    for kind in EquilibriumKind:
        eq = next((e for e in found if e.kind is kind), None)
        if eq is None:
            eq = candidate(model.dist, model.g, model.params, q, kind, p_m)
        rows.append(row_from_point(eq, model, exists=kind in existing))
    if not existing:
        rows.append(marker_row(q, NONE_KIND))
    return rows


def boundary_points(model: GameModel, q_min: float, q_max: float, p_m: float, workers: int = 1) -> List[float]:
    """Refined existence boundaries of every kind inside [q_min, q_max]."""
    points: List[float] = []
    for lo, hi in discriminatory_intervals(model.dist, model.g, model.params, workers=workers, p_m=p_m):
        points.extend([lo, hi])
    prior = model.prior_t1()
    eta = model.eta
    if abs(prior - eta) > 1e-9:
        kind = EquilibriumKind.UNIFORM_A if prior > eta else EquilibriumKind.UNIFORM_B
        bound = uniform_boundary(model.dist, model.g, model.params, kind, p_m)
        if bound is not None and not bound.entire_interval:
            points.append(bound.q_bar)
    return sorted(p for p in set(points) if q_min <= p <= q_max)


def build_sweep(
    model: GameModel,
    qs: Sequence[float],
    workers: int = 1,
    all_kinds: bool = False,
    refine: bool = True,
    skip_error: bool = False,
    logger_prefix: str = "PrivAd_Sweep",
    quiet: bool = False,
) -> SweepTable:
    """Classify every grid point (plus refined boundaries) and tabulate metrics in q order."""
    p_m = monopoly_price(model.dist)
    grid = sorted(set(float(q) for q in qs))
    if refine and len(grid) > 1:
        extra = boundary_points(model, grid[0], grid[-1], p_m, workers)
        if not quiet and extra:
            _log(logger_prefix, f"refined boundaries: {', '.join(f'{q:.6f}' for q in extra)}")
        grid = sorted(set(grid) | set(extra))
    if not quiet:
        _log(logger_prefix, f"sweep {model.name}: {len(grid)} points, q in [{grid[0]:.6g}, {grid[-1]:.6g}], workers={workers}")

    def one(q: float) -> List[SweepRow]:
        try:
            return sweep_point(model, q, p_m, all_kinds)
        except Exception as e:
            if skip_error:
                if not quiet:
                    _log(logger_prefix, f"skip_error=True, q={q:.6g} failed: {e}")
                return [marker_row(q, ERROR_KIND, str(e))]
            raise

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(one, grid))
    else:
        batches = [one(q) for q in grid]

    rows = [row for batch in batches for row in sorted(batch, key=lambda r: KIND_ORDER.index(r.kind))]
    return SweepTable(model_name=model.name, rows=rows, p_m=p_m)


def revalidate(table: SweepTable, model: GameModel, tol: float = 1e-9) -> List[str]:
    """Re-run classify at every row; returns a description of each mismatch."""
    p_m = monopoly_price(model.dist)
    problems = []
    for q in table.qs():
        expected = {r.kind for r in table.rows if r.q == q and r.exists}
        found = classify(model.dist, model.g, model.params, q, p_m)
        got = {eq.kind.value for eq in found}
        if got != expected:
            problems.append(f"q={q:.12g}: table {sorted(expected)} vs classify {sorted(got)}")
            continue
        for eq in found:
            if not holds(eq.kind, eq.posteriors, model.eta, tol):
                problems.append(f"q={q:.12g}: {eq.kind.value} fails its own condition")
    return problems


def write_csv(
    table: SweepTable,
    path: Path,
    extra_columns: Sequence[str] = (),
    extras: Optional[Sequence[Dict[str, str]]] = None,
) -> Path:
    """Write the table; extras (one dict per row) fill extra_columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(CSV_COLUMNS) + list(extra_columns)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        for i, row in enumerate(table.rows):
            record = row.as_csv()
            if extras is not None:
                record.update(extras[i])
            writer.writerow({k: record.get(k, "") for k in header})
    return path


def read_csv(path: Path, model_name: str = "") -> SweepTable:
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing columns {', '.join(missing)}")
        rows = [SweepRow.from_csv(record) for record in reader]
    return SweepTable(model_name=model_name or Path(path).stem, rows=rows)


def preferred_q(table: SweepTable, column: str, kind: str = EquilibriumKind.DISCRIMINATORY.value) -> Optional[float]:
    """q that maximizes column among existing rows of kind; ties go to the smallest q."""
    best_q, best_value = None, -math.inf
    for row in table.rows_of(kind):
        value = getattr(row, column)
        if value is not None and value > best_value:
            best_q, best_value = row.q, value
    return best_q


def interval_summary(table: SweepTable, kind: str) -> List[List[float]]:
    """Runs of consecutive grid points at which kind exists, as [first q, last q]."""
    runs: List[List[float]] = []
    previous_present = False
    for q in table.qs():
        present = any(r.kind == kind and r.exists and r.q == q for r in table.rows)
        if present and not previous_present:
            runs.append([q, q])
        elif present:
            runs[-1][1] = q
        previous_present = present
    return runs
