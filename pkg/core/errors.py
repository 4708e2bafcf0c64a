"""
Error types for the equilibrium engine.

Scalar precondition failures (q outside [1/2,1], negative epsilon, ...) raise
ValueError directly; everything below is for failures of the model or of the
numerics.
"""


class GameError(RuntimeError):
    """Base error for the equilibrium engine."""


class ModelValidationError(GameError):
    """Raised when a game model violates the standing assumptions."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"Model validation failed: {report.summary()}")


class QuadratureError(GameError):
    """Raised when an integral does not reach the requested tolerance."""


class RootBracketError(GameError):
    """Raised when a root-finding bracket has no sign change."""


class CornerSolutionError(GameError):
    """Raised when an operation needs an interior pricing solution."""


class ConfigError(GameError):
    """Raised for malformed or unknown config entries."""
