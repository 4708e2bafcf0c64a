"""
Base command: staged execution shared by every subcommand.

Stages: config load -> model validation -> compute -> output. A failure in
any stage is re-raised as RuntimeError("[<prefix>] <Stage> failed: ...")
with the original exception chained as __cause__.
"""

import argparse
from abc import ABC, abstractmethod
from typing import Any

from core.config import RunConfig, load_config
from core.errors import ModelValidationError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_NO_EQUILIBRIUM = 3


class CommandBase(ABC):
    """One CLI subcommand."""

    NAME: str = ""
    HELP: str = ""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    @property
    def _log_prefix(self) -> str:
        return f"PrivAd_{self.__class__.__name__.replace('Command', '')}"

    def _log(self, msg: str):
        if not self.quiet:
            print(f"[{self._log_prefix}] {msg}")

    # ---- argument surface ----

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        """Override in subclass: subcommand-specific flags."""

    def overrides(self, args: argparse.Namespace) -> dict:
        """Command-line values that take priority over env and file."""
        return {
            "workers": getattr(args, "workers", None),
            "out_dir": getattr(args, "out_dir", None),
            "steps": getattr(args, "steps", None),
        }

    # ---- stages ----

    def load(self, args: argparse.Namespace) -> RunConfig:
        config = load_config(getattr(args, "config", None))
        return config.with_overrides(**self.overrides(args))

    def validate(self, config: RunConfig):
        report = config.model.validate(config.validation_grid)
        if not report.ok:
            raise ModelValidationError(report)
        self._log(f"model ok: {config.model.describe()}")

    @abstractmethod
    def compute(self, config: RunConfig, args: argparse.Namespace) -> Any:
        pass

    @abstractmethod
    def emit(self, result: Any, config: RunConfig, args: argparse.Namespace) -> int:
        """Write/print the result; returns the exit code."""

    # ---- main execution ----

    def execute(self, args: argparse.Namespace) -> int:
        try:
            config = self.load(args)
        except Exception as e:
            raise RuntimeError(f"[{self._log_prefix}] Config load failed: {e}") from e

        try:
            self.validate(config)
        except Exception as e:
            raise RuntimeError(f"[{self._log_prefix}] Validation failed: {e}") from e

        try:
            result = self.compute(config, args)
        except Exception as e:
            raise RuntimeError(f"[{self._log_prefix}] Compute failed: {e}") from e

        try:
            return self.emit(result, config, args)
        except Exception as e:
            raise RuntimeError(f"[{self._log_prefix}] Output failed: {e}") from e
