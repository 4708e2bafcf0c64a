"""
sweep: tabulate equilibria and metrics along the q (or epsilon) grid.
"""

import argparse
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

from core.config import RunConfig
from core.equilibrium import EquilibriumKind

from .base import EXIT_OK, CommandBase
from .plots import emit_all
from .sweep_table import SweepTable, build_sweep, interval_summary, preferred_q, write_csv


@dataclass
class SweepResult:
    table: SweepTable
    written: List[Path] = field(default_factory=list)


class SweepCommand(CommandBase):
    NAME = "sweep"
    HELP = "sweep q over the config grid and write CSV (and SVG with --svg)"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        parser.add_argument("--svg", action="store_true", help="also write the SVG figures")
        parser.add_argument("--all-kinds", action="store_true",
                            help="tabulate every kind at every q, existing or not")
        parser.add_argument("--no-refine", action="store_true", help="skip boundary refinement")
        parser.add_argument("--skip-error", action="store_true",
                            help="turn a failing grid point into an 'error' row instead of aborting")
        parser.add_argument("--output", type=str, default=None, help="CSV path (default <out_dir>/<model>_sweep.csv)")

    def compute(self, config: RunConfig, args: argparse.Namespace) -> SweepResult:
        table = build_sweep(
            config.model,
            config.q_grid(),
            workers=config.workers,
            all_kinds=args.all_kinds,
            refine=not args.no_refine and config.epsilons is None,
            skip_error=args.skip_error,
            logger_prefix=self._log_prefix,
            quiet=self.quiet,
        )
        return SweepResult(table=table)

    def summarize(self, table: SweepTable):
        for kind in EquilibriumKind:
            runs = interval_summary(table, kind.value)
            if runs:
                shown = ", ".join(f"[{a:.6f}, {b:.6f}]" for a, b in runs)
                self._log(f"{kind.value} exists on {shown}")
        self._log(f"existence sequence: {' -> '.join(table.kind_sequence())}")
        for column in ("adv_utility", "mi_bits", "r1", "cs", "profit"):
            best = preferred_q(table, column)
            if best is not None:
                self._log(f"discriminatory {column} peaks at q={best:.6f}")

    def emit(self, result: SweepResult, config: RunConfig, args: argparse.Namespace) -> int:
        stem = f"{config.model.name}_sweep".replace("+", "_")
        out_dir = Path(config.out_dir)
        csv_path = Path(args.output) if args.output else out_dir / f"{stem}.csv"
        result.written.append(write_csv(result.table, csv_path))
        if args.svg:
            result.written.extend(emit_all(result.table, out_dir, stem, eta=config.model.eta))
        self.summarize(result.table)
        for path in result.written:
            self._log(f"wrote {path}")
        return EXIT_OK
