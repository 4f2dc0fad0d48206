"""Exception hierarchy shared by all qkneser modules."""


class QKneserError(Exception):
    """Base class for every error raised by this package."""


class NotPrimePower(QKneserError, ValueError):
    """Field order has two distinct prime factors."""


class Unsupported(QKneserError, ValueError):
    """Requested parameter is outside the supported desk-scale set."""


class DivisionByZero(QKneserError, ZeroDivisionError):
    """Multiplicative inverse of zero requested."""


class DimensionMismatch(QKneserError, ValueError):
    """Operands live in different ambient spaces or have different types."""


class InvalidArgs(QKneserError, ValueError):
    """Arguments violate an operation's preconditions."""


class InvalidType(QKneserError, ValueError):
    """Flag type is malformed or outside the supported shapes."""


class InvalidDescriptor(QKneserError, ValueError):
    """Independent-set descriptor violates one of its invariants."""


class NotIndependent(QKneserError, ValueError):
    """A set required to be independent contains an adjacent pair."""


class MalformedCertificate(QKneserError, ValueError):
    """Covering certificate fails structural validation."""


class TooLarge(QKneserError):
    """Requested computation exceeds the configured desk-scale guard."""


class HypothesisViolation(QKneserError, ValueError):
    """A grid point violates the hypotheses of the inequality being checked."""
