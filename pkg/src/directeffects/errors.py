"""Exception hierarchy shared by every module."""


class DirectEffectsError(Exception):
    """Base class for all package errors."""


class ConfigurationError(DirectEffectsError, ValueError):
    """Invalid dimensions, probabilities or experiment settings."""


class UsageError(DirectEffectsError, ValueError):
    """A function was called with arguments it cannot work with."""


class DegenerateResponseError(DirectEffectsError, ValueError):
    """The response has a single class, or no valid fold split exists."""


class ConvergenceError(DirectEffectsError, RuntimeError):
    """An iterative solver hit its iteration cap.

    The last iterate is kept on ``last_iterate`` so callers can inspect or
    reuse it.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class DataError(DirectEffectsError, ValueError):
    """Input data violates a content rule (e.g. too many missing genotypes)."""


class ParseError(DataError):
    """Malformed dataset file. Carries the 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(DataError):
    """A results file was written with an incompatible schema version."""
