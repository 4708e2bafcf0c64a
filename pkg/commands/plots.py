"""
SVG figures from a SweepTable.

Every emitter is a pure function of the table: fixed hash salt, no date
metadata, Agg backend.
"""

import math
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sweep_table import SweepTable  # noqa: E402

SVG_SALT = "privad"
FIGSIZE = (6.4, 4.0)
KIND_STYLE = {
    "discriminatory": {"color": "tab:blue", "label": "discriminatory"},
    "uniform_A": {"color": "tab:green", "label": "uniform A"},
    "uniform_B": {"color": "tab:red", "label": "uniform B"},
}


def _series(table: SweepTable, kind: str, column: str, existing_only: bool = True) -> Tuple[List[float], List[float]]:
    """x/y for one kind, with NaN at grid points where it is absent so lines break at gaps."""
    by_q: Dict[float, Optional[float]] = {
        r.q: getattr(r, column) for r in table.rows_of(kind, existing_only)
    }
    xs, ys = [], []
    for q in table.qs():
        value = by_q.get(q)
        xs.append(q)
        ys.append(math.nan if value is None else value)
    return xs, ys


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _axes(title: str, ylabel: str):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.set_title(title)
    ax.set_xlabel("q")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def plot_prices(table: SweepTable, path: Path) -> Path:
    fig, ax = _axes("Prices and cutoffs", "value")
    xs, price = _series(table, "discriminatory", "price", existing_only=False)
    _, cutoff = _series(table, "discriminatory", "cutoff", existing_only=False)
    ax.plot(xs, price, color="tab:blue", label="p1(q)")
    ax.plot(xs, cutoff, color="tab:orange", label="v*(q)")
    p_m = table.p_m
    if p_m is None:
        monopoly = [r.price for r in table.rows if r.kind in ("uniform_A", "uniform_B") and r.price is not None]
        p_m = monopoly[0] if monopoly else None
    if p_m is not None:
        ax.axhline(p_m, color="gray", linestyle="--", label="p_m")
    ax.legend()
    return _save(fig, path)


def plot_posteriors(table: SweepTable, path: Path, eta: Optional[float] = None) -> Path:
    fig, ax = _axes("Advertiser posteriors", "Pr(t1 | signal)")
    for kind, style in KIND_STYLE.items():
        xs, r1 = _series(table, kind, "r1")
        _, r0 = _series(table, kind, "r0")
        ax.plot(xs, r1, color=style["color"], label=f"r1 {style['label']}")
        ax.plot(xs, r0, color=style["color"], linestyle="--", label=f"r0 {style['label']}")
    if eta is not None:
        ax.axhline(eta, color="black", linewidth=0.8, label="eta")
    ax.legend(fontsize="small")
    return _save(fig, path)


def _single_column(table: SweepTable, path: Path, column: str, title: str, ylabel: str) -> Path:
    fig, ax = _axes(title, ylabel)
    for kind, style in KIND_STYLE.items():
        xs, ys = _series(table, kind, column)
        if any(not math.isnan(y) for y in ys):
            ax.plot(xs, ys, color=style["color"], label=style["label"])
    ax.legend()
    return _save(fig, path)


def plot_mutual_information(table: SweepTable, path: Path) -> Path:
    return _single_column(table, path, "mi_bits", "Information in the signal about type", "bits")


def plot_advertiser_utility(table: SweepTable, path: Path) -> Path:
    return _single_column(table, path, "adv_utility", "Advertiser utility", "utility")


def plot_welfare(table: SweepTable, path: Path) -> Path:
    """Consumer surplus, its period-2 part, and seller profit for every kind in the table."""
    fig, ax = _axes("Consumer surplus and profit", "value")
    for kind, style in KIND_STYLE.items():
        existing_only = not any(not r.exists for r in table.rows if r.kind == kind)
        xs, cs = _series(table, kind, "cs", existing_only)
        _, period2 = _series(table, kind, "cs_period2", existing_only)
        _, profit = _series(table, kind, "profit", existing_only)
        if all(math.isnan(y) for y in cs):
            continue
        ax.plot(xs, cs, color=style["color"], label=f"CS {style['label']}")
        ax.plot(xs, period2, color=style["color"], linestyle=":", label=f"CS period 2 {style['label']}")
        ax.plot(xs, profit, color=style["color"], linestyle="--", label=f"profit {style['label']}")
    ax.legend(fontsize="small")
    return _save(fig, path)


def plot_discontinuities(table: SweepTable, path: Path) -> Path:
    """Three stacked panels of the existing equilibria only; gaps show where none exists."""
    fig, axes = plt.subplots(3, 1, figsize=(6.4, 8.0), sharex=True)
    panels = (("cs", "consumer surplus"), ("profit", "seller profit"), ("adv_utility", "advertiser utility"))
    for ax, (column, label) in zip(axes, panels):
        for kind, style in KIND_STYLE.items():
            xs, ys = _series(table, kind, column)
            if any(not math.isnan(y) for y in ys):
                ax.plot(xs, ys, color=style["color"], marker=".", markersize=2, label=style["label"])
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[0].set_title("Equilibrium outcomes along q")
    axes[0].legend(fontsize="small")
    axes[-1].set_xlabel("q")
    return _save(fig, path)


FIGURES: Dict[str, Callable[..., Path]] = {
    "prices": plot_prices,
    "posteriors": plot_posteriors,
    "mutual_information": plot_mutual_information,
    "advertiser_utility": plot_advertiser_utility,
    "welfare": plot_welfare,
    "discontinuities": plot_discontinuities,
}


def emit_all(table: SweepTable, out_dir: Path, stem: str, eta: Optional[float] = None,
             names: Sequence[str] = tuple(FIGURES)) -> List[Path]:
    out_dir = Path(out_dir)
    paths = []
    for name in names:
        path = out_dir / f"{stem}_{name}.svg"
        if name == "posteriors":
            paths.append(plot_posteriors(table, path, eta))
        else:
            paths.append(FIGURES[name](table, path))
    return paths
