"""Exception hierarchy shared by all modules."""


class SortitionError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SortitionError, ValueError):
    """An argument violates a documented precondition."""


class ProfileParseError(ValidationError):
    """A profile file could not be parsed.

    ``row`` and ``col`` are 0-based voter and issue indices of the offending
    cell, or ``None`` when the problem is not tied to one cell.
    """

    def __init__(self, message, row=None, col=None):
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", col {col})" if col is not None else ")")
        super().__init__(message + where)
        self.row = row
        self.col = col


class DimensionError(ValidationError):
    """Declared and actual dimensions disagree."""


class ResourceLimitError(SortitionError):
    """A computation would exceed a configured size cap."""


class GenerationError(SortitionError):
    """A randomized generator failed to produce a valid instance."""
