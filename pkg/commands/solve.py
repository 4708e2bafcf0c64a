"""
solve: classify the game at one privacy level and report every equilibrium.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import List

from core.config import RunConfig
from core.equilibrium import classify
from core.model import PrivacyLevel
from core.pricing import monopoly_price

from .base import EXIT_NO_EQUILIBRIUM, EXIT_OK, CommandBase
from .sweep_table import NONE_KIND, SweepRow, SweepTable, marker_row, row_from_point, write_csv


@dataclass
class SolveResult:
    level: PrivacyLevel
    p_m: float
    rows: List[SweepRow]

    @property
    def found(self) -> bool:
        return any(r.kind != NONE_KIND for r in self.rows)


def format_row(row: SweepRow) -> str:
    flags = []
    if row.boundary_flag:
        flags.append("boundary")
    if row.limit_flag:
        flags.append("path-limit")
    lines = [
        f"  {row.kind}{' [' + ', '.join(flags) + ']' if flags else ''}",
        f"    price={row.price:.6f} cutoff={row.cutoff:.6f}",
        f"    r1={row.r1:.6f} r0={row.r0:.6f} gap={row.posterior_gap:.6f}",
        f"    consumer_surplus={row.cs:.6f} (period 2: {row.cs_period2:.6f}) "
        f"seller_profit={row.profit:.6f} advertiser_utility={row.adv_utility:.6f}",
        f"    mi_bits={row.mi_bits:.6f}"
        + (f" cs_derivative={row.cs_derivative:.6f}" if row.cs_derivative is not None else ""),
    ]
    return "\n".join(lines)


class SolveCommand(CommandBase):
    NAME = "solve"
    HELP = "classify the equilibria at one q (or epsilon)"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        level = parser.add_mutually_exclusive_group(required=True)
        level.add_argument("--q", type=float, help="channel fidelity in [1/2, 1]")
        level.add_argument("--epsilon", type=float, help="privacy parameter (inf allowed)")
        parser.add_argument("--csv", type=str, default=None, help="also write the rows to this CSV file")

    def compute(self, config: RunConfig, args: argparse.Namespace) -> SolveResult:
        if args.q is not None:
            level = PrivacyLevel.from_q(args.q)
        else:
            level = PrivacyLevel.from_epsilon(args.epsilon)
        model = config.model
        p_m = monopoly_price(model.dist)
        found = classify(model.dist, model.g, model.params, level.q, p_m)
        rows = [row_from_point(eq, model) for eq in found] or [marker_row(level.q, NONE_KIND)]
        return SolveResult(level=level, p_m=p_m, rows=rows)

    def emit(self, result: SolveResult, config: RunConfig, args: argparse.Namespace) -> int:
        print(f"{config.model.describe()}")
        print(f"q={result.level.q:.6g} epsilon={result.level.epsilon:.6g} p_m={result.p_m:.6f}")
        if not result.found:
            print("  no equilibrium")
        for row in result.rows:
            if row.kind != NONE_KIND:
                print(format_row(row))
        if args.csv:
            path = write_csv(SweepTable(config.model.name, result.rows, result.p_m), Path(args.csv))
            self._log(f"wrote {path}")
        return EXIT_OK if result.found else EXIT_NO_EQUILIBRIUM
