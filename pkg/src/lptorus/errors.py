"""Exception types shared across the package."""


class LPTorusError(Exception):
    """Base class for all package errors."""


class ResolutionError(LPTorusError, ValueError):
    """A sampling grid is too coarse for the declared degree (aliasing)."""


class BudgetError(LPTorusError, MemoryError):
    """A requested grid would exceed the configured memory budget."""


class DegenerateInputError(LPTorusError, ValueError):
    """An operation was handed an input it cannot normalise (e.g. f = 0)."""
