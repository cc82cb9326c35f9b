"""Exception types shared across the package.

Plain ``ValueError`` is used for ordinary domain violations (negative
distances, pole arguments, ...).  The classes below exist so that callers
can tell apart "this parameter combination is outside what the numerics
support" from "the numerics ran but did not reach the requested accuracy",
which the CLI maps to different exit codes.
"""


class UnsupportedParametersError(ValueError):
    """Parameter combination outside the supported region (e.g. no
    pole-separating contour exists, or the contour integral diverges)."""


class AccuracyError(ArithmeticError):
    """A numerical routine converged insufficiently.

    Carries ``achieved``, the best error estimate reached, so callers can
    report how far off the result is.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class TableFormatError(ValueError):
    """Absorption-table file failed validation; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConfigError(ValueError):
    """Invalid scenario configuration; message carries the offending
    field path (e.g. 'geom.sigma_s')."""
