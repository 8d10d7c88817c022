"""Exception types shared across the library."""


class DataError(ValueError):
    """Input data violates a documented contract (bad CSV cell, missing
    labels, shape or dimension mismatch, parameter out of range)."""


class NumericalError(RuntimeError):
    """A computation cannot proceed numerically (degenerate projections,
    rank collapse, eigensolver failure)."""
