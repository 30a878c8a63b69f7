"""Exception hierarchy.

The two intermediate classes exist so the command-line front end can map
failures onto its exit-code contract: ``DataError`` -> 2, ``NumericError`` -> 3,
``UsageError`` -> 1.
"""


class SigdistError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(SigdistError):
    """Bad command line: unknown flags, unsupported model specs, etc."""


class DataError(SigdistError):
    """Malformed or inconsistent input data or documents."""


class NumericError(SigdistError):
    """Numerically degenerate input or failed numerical operation."""


class DimensionMismatch(DataError):
    """Point or matrix dimensions disagree with the model."""


class NonFiniteInput(DataError):
    """An input contains NaN or infinity where a finite value is required."""


class TooFewPoints(DataError):
    """A fit was requested on fewer data points than the method needs."""


class SchemaError(DataError):
    """A JSON document has an unknown schema version or a bad shape."""


class InvalidParameter(DataError):
    """A parameter violates its documented range or structure."""


class ZeroVariance(NumericError):
    """A data dimension has zero spread; an automatic bandwidth is undefined."""


class FactorizationError(NumericError):
    """A covariance matrix is not symmetric positive definite."""
