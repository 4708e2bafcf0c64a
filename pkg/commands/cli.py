"""
Command-line front end.

    privad solve    --config F --q Q
    privad sweep    --config F [--svg]
    privad verify   --config F
    privad simulate --config F --n N --seed S

Exit codes: 0 success, 1 failure, 2 invalid input, 3 no equilibrium (solve).
"""

import argparse
import sys
from typing import Dict, List, Optional, Type

from core.errors import ConfigError, ModelValidationError
from core.presets import preset_names

from .base import EXIT_FAILURE, EXIT_INVALID, CommandBase
from .simulate import SimulateCommand
from .solve import SolveCommand
from .sweep import SweepCommand
from .verify import VerifyCommand

COMMANDS: Dict[str, Type[CommandBase]] = {
    cls.NAME: cls for cls in (SolveCommand, SweepCommand, VerifyCommand, SimulateCommand)
}
INVALID_INPUT = (ConfigError, ModelValidationError, ValueError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privad",
        description="Equilibria of the two-period targeted-advertising game under a randomized-response privacy channel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, cls in COMMANDS.items():
        p = sub.add_parser(name, help=cls.HELP)
        p.add_argument("--config", type=str, default=None,
                       help=f"key=value game config (default preset; presets: {', '.join(preset_names())})")
        p.add_argument("--out-dir", dest="out_dir", type=str, default=None, help="output directory")
        p.add_argument("--steps", type=int, default=None, help="q grid size (overrides config)")
        p.add_argument("--workers", type=int, default=None, help="worker threads")
        p.add_argument("--quiet", action="store_true", help="suppress progress lines")
        cls.add_arguments(p)
    return parser


def root_cause(error: BaseException) -> BaseException:
    """Innermost chained exception."""
    while error.__cause__ is not None:
        error = error.__cause__
    return error


def exit_code_for(error: BaseException) -> int:
    chain = error
    while chain is not None:
        if isinstance(chain, INVALID_INPUT):
            return EXIT_INVALID
        chain = chain.__cause__
    return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = COMMANDS[args.command](quiet=args.quiet)
    try:
        return command.execute(args)
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        cause = root_cause(e)
        if cause is not e:
            print(f"  caused by {type(cause).__name__}: {cause}", file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
