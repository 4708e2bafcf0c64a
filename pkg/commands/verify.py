"""
verify: run the property suite on the configured model.
"""

import argparse
from typing import List

from core.config import RunConfig

from .base import EXIT_FAILURE, EXIT_OK, CommandBase
from .verify_suite import DEFAULT_GRID, PropertyResult, VerifySuite


class VerifyCommand(CommandBase):
    NAME = "verify"
    HELP = "check every model property and print pass/fail per property"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        parser.add_argument("--grid", type=int, default=DEFAULT_GRID, help="q grid size for the property scans")
        parser.add_argument("--n", type=int, default=None, help="oracle samples per point (default: oracle_n)")
        parser.add_argument("--seed", type=int, default=None, help="oracle seed (default: oracle_seed)")

    def overrides(self, args: argparse.Namespace) -> dict:
        out = super().overrides(args)
        out["oracle_n"] = args.n
        out["oracle_seed"] = args.seed
        return out

    def compute(self, config: RunConfig, args: argparse.Namespace) -> List[PropertyResult]:
        suite = VerifySuite(
            config.model,
            grid=args.grid,
            oracle_n=config.oracle_n,
            oracle_seed=config.oracle_seed,
            workers=config.workers,
            logger_prefix=self._log_prefix,
            quiet=True,
        )
        return suite.run()

    def emit(self, results: List[PropertyResult], config: RunConfig, args: argparse.Namespace) -> int:
        width = max(len(r.name) for r in results)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}")
        failed = [r.name for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} properties hold for {config.model.name}")
        return EXIT_OK if not failed else EXIT_FAILURE
