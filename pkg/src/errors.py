"""
Exception hierarchy for the BREA simulator.

Everything raised on purpose by the library derives from BreaError. Errors
that describe a bad input value also derive from ValueError so callers that
only know about the builtin still catch them.
"""


class BreaError(Exception):
    """Base class for all simulator errors."""


class NotPrime(BreaError, ValueError):
    """A field or group modulus failed the primality test."""


class ZeroInverse(BreaError, ZeroDivisionError):
    """Attempted to invert zero in a prime field."""


class LengthMismatch(BreaError, ValueError):
    """Two field vectors that must have equal length do not."""


class NoGroupFound(BreaError):
    """No commitment group was found within the search limit."""


class OutOfRange(BreaError, ValueError):
    """An integer is too large to embed in the field with two's complement."""


class OverflowViolation(BreaError):
    """A field computation would wrap around the modulus."""

    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = offending


class BadParams(BreaError, ValueError):
    """Protocol or algorithm parameters are inconsistent."""


class DuplicatePoints(BreaError, ValueError):
    """Shares were given for the same evaluation point twice."""


class DuplicateTheta(BreaError, ValueError):
    """Interpolation points contain a repeated abscissa."""


class RadiusViolated(BreaError):
    """Too few evaluations are present for the requested correction radius."""


class DecodeFailure(BreaError):
    """No polynomial of the requested degree fits the evaluations."""

    def __init__(self, message, agreements=None, pair=None):
        super().__init__(message)
        self.agreements = agreements
        self.pair = pair
        self.column = None


class RefusedSmallSet(BreaError):
    """An honest user refused to aggregate for a selected set of the wrong size."""


class PhaseOrderError(BreaError):
    """A message was sent or collected outside its protocol phase."""


class PrivacyViolation(BreaError):
    """A message would cross the privacy boundary (e.g. a raw share to the server)."""


class EmptyPartition(BreaError, ValueError):
    """A user's data partition has no samples."""


class ConfigError(BreaError, ValueError):
    """An experiment configuration is invalid."""

    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class RoundAbort(BreaError):
    """A protocol round could not complete."""

    def __init__(self, phase, reason, cause=None):
        super().__init__(f"round aborted in {phase}: {reason}")
        self.phase = phase
        self.reason = reason
        self.cause = cause
        self.outcome = None
