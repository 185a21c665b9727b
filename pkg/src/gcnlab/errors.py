"""Exception types shared across the library."""


class GcnLabError(Exception):
    """Base class for all gcnlab errors."""


class DimensionMismatchError(GcnLabError):
    """Inputs that should live in the same ambient space do not."""


class NumericalError(GcnLabError):
    """A numerical routine produced an inconsistent result (e.g. a Gram
    determinant far below zero, or an eigensolver that did not converge)."""


class DegenerateSimplexError(GcnLabError):
    """An operation that requires nonzero edge lengths was given a simplex
    with a repeated vertex."""


class DegenerateMeasureError(GcnLabError):
    """The measure's support is too flat for the requested operation."""


class EnumerationCapError(GcnLabError):
    """Exact enumeration would exceed the tuple-evaluation cap; rerun in
    Monte-Carlo mode or raise the cap explicitly."""
