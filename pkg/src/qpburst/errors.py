"""Exception types shared across the package."""


class QpburstError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(QpburstError, ValueError):
    """A numeric argument violates its precondition (sign, range, ...)."""


class BelowGapError(InvalidParameterError):
    """Phonon energy below 2*Delta: pair breaking is impossible."""


class ConfigError(QpburstError):
    """A configuration value or file is invalid."""


class InvalidInputError(QpburstError, ValueError):
    """Input data violates a structural requirement (e.g. non-uniform spacing)."""


class InsufficientDataError(QpburstError):
    """Not enough data points to carry out the requested analysis."""


class DatasetParseError(QpburstError):
    """A dataset or sidecar file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
