"""Exception types raised by speccoh.

Every error is a ``ValueError`` subclass so callers that only care about
"bad input" can catch that, while the CLI maps the finer classes onto exit
codes.
"""


class SpeccohError(ValueError):
    """Base class for all speccoh errors."""


class PreconditionError(SpeccohError):
    """An operation was called outside its documented domain."""


class NumericError(SpeccohError):
    """A numerical computation failed on otherwise well-formed input."""


class NonSquareError(PreconditionError):
    pass


class TooAsymmetricError(PreconditionError):
    pass


class NotPositiveDefiniteError(NumericError):
    pass


class BadCountError(PreconditionError):
    pass


class LengthMismatchError(PreconditionError):
    pass


class FrequencyOutOfRangeError(PreconditionError):
    pass


class DegenerateTracesError(NumericError):
    pass


class NonPositiveDenominatorError(NumericError):
    pass


class InsufficientTapersError(PreconditionError):
    pass


class NonPositiveDiagonalError(NumericError):
    pass


class DimensionMismatchError(PreconditionError):
    pass


class ZeroBaselineError(NumericError):
    pass


class EmptyGridError(PreconditionError):
    pass


class ConfigError(PreconditionError):
    """A scenario file or command-line configuration is malformed."""
