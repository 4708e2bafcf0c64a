"""
simulate: run the Monte-Carlo oracle against the classified equilibrium at
every grid point and append the empirical columns to the sweep CSV.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from core.config import RunConfig
from core.equilibrium import EquilibriumKind, candidate
from core.oracle import QUANTITIES, SimReport, StrategyProfile, simulate
from core.pricing import monopoly_price

from .base import EXIT_OK, CommandBase
from .sweep_table import SweepTable, build_sweep, format_number, write_csv

EMPIRICAL_COLUMNS = [f"emp_{name}" for name in QUANTITIES] + [f"emp_{name}_se" for name in QUANTITIES] + [
    "emp_p_sig0", "oracle_n", "oracle_seed",
]


@dataclass
class SimulateResult:
    table: SweepTable
    reports: List[Optional[SimReport]]


def empirical_record(report: Optional[SimReport]) -> Dict[str, str]:
    if report is None:
        return {}
    record = {f"emp_{name}": format_number(report.value(name)) for name in QUANTITIES}
    record.update({f"emp_{name}_se": format_number(se) for name, se in report.standard_errors.items()})
    record["emp_p_sig0"] = format_number(report.p_sig0)
    record["oracle_n"] = str(report.n)
    record["oracle_seed"] = str(report.seed)
    return record


class SimulateCommand(CommandBase):
    NAME = "simulate"
    HELP = "cross-check the sweep with the Monte-Carlo oracle"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        parser.add_argument("--n", type=int, default=None, help="samples per grid point (default: oracle_n)")
        parser.add_argument("--seed", type=int, default=None, help="RNG seed (default: oracle_seed)")
        parser.add_argument("--skip-error", action="store_true",
                            help="turn a failing grid point into an 'error' row instead of aborting")
        parser.add_argument("--output", type=str, default=None,
                            help="CSV path (default <out_dir>/<model>_simulate.csv)")

    def overrides(self, args: argparse.Namespace) -> dict:
        out = super().overrides(args)
        out["oracle_n"] = args.n
        out["oracle_seed"] = args.seed
        return out

    def compute(self, config: RunConfig, args: argparse.Namespace) -> SimulateResult:
        model = config.model
        table = build_sweep(
            model,
            config.q_grid(),
            workers=config.workers,
            refine=False,
            skip_error=args.skip_error,
            logger_prefix=self._log_prefix,
            quiet=self.quiet,
        )
        p_m = monopoly_price(model.dist)
        self._log(f"oracle n={config.oracle_n} seed={config.oracle_seed} over {len(table.rows)} rows")
        reports: List[Optional[SimReport]] = []
        for row in table.rows:
            if not row.exists:
                reports.append(None)
                continue
            try:
                eq = candidate(model.dist, model.g, model.params, row.q, EquilibriumKind(row.kind), p_m)
                reports.append(simulate(
                    model.dist, model.g, model.params, row.q,
                    StrategyProfile.from_equilibrium(eq),
                    config.oracle_n, config.oracle_seed,
                    workers=config.workers,
                    logger_prefix=self._log_prefix,
                    quiet=self.quiet,
                ))
            except Exception as e:
                if not args.skip_error:
                    raise
                self._log(f"skip_error=True, oracle at q={row.q:.6g} failed: {e}")
                reports.append(None)
        return SimulateResult(table=table, reports=reports)

    def emit(self, result: SimulateResult, config: RunConfig, args: argparse.Namespace) -> int:
        stem = f"{config.model.name}_simulate".replace("+", "_")
        path = Path(args.output) if args.output else Path(config.out_dir) / f"{stem}.csv"
        extras = [empirical_record(report) for report in result.reports]
        write_csv(result.table, path, EMPIRICAL_COLUMNS, extras)
        self._log(f"wrote {path}")
        return EXIT_OK
