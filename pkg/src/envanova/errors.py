"""Exception and warning types shared across the package."""

from __future__ import annotations


class EnvAnovaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(EnvAnovaError, ValueError):
    """An argument violates a documented precondition."""


class ParseError(InvalidInputError):
    """A dataset or weights file could not be parsed.

    Carries enough location context (row/column, 1-based) to point the
    user at the offending cell.
    """

    def __init__(self, message: str, *, row: int | None = None, column: int | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class DegenerateVarianceError(EnvAnovaError):
    """A variance that must be positive is exactly zero.

    Raised by the unequal-variance rescaling and the variance-corrected
    F statistic; names the offending group and grid point.
    """

    def __init__(self, group: int, grid_point: float, detail: str = ""):
        message = f"zero variance in group {group} at grid point {grid_point!r}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.group = group
        self.grid_point = grid_point


class InsufficientPermutationsWarning(UserWarning):
    """alpha * s < 1: the test cannot reject at this level."""
