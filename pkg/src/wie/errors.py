"""Exception hierarchy shared across the package.

Plain bad arguments raise ValueError; everything with domain meaning gets
its own class so callers (and the CLI exit-code mapping) can tell failure
modes apart.
"""


class WieError(Exception):
    """Base class for all package-specific errors."""


class OutOfDomainError(WieError, ValueError):
    """Evaluation requested outside the domain an object is defined on."""


class SampleParseError(WieError, ValueError):
    """Malformed force-sample CSV; carries the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(WieError, ValueError):
    """Invalid or unknown scenario-configuration content."""


class ConfigurationError(WieError):
    """Solver configuration violates a hard numerical guard."""


class ResolutionError(WieError):
    """Quadrature cannot resolve the declared oscillation."""


class ConditioningError(WieError):
    """Factorization of the reduced system failed."""

    def __init__(self, message: str, condition_estimate: float | None = None):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class AccuracyError(WieError):
    """Solution residual exceeded the configured tolerance."""
