"""Exception types shared across the package."""


class OrliczError(Exception):
    """Base class for all package errors."""


class ConformanceError(OrliczError):
    """A field does not conform to the mesh it is evaluated on."""


class GeometryError(OrliczError):
    """Domain geometry cannot support the requested construction."""


class BracketRangeError(OrliczError):
    """A monotone bracketing search ran out of representable range.

    Carries the last attempted bracket as ``(lo, hi)``.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ZeroDenominatorError(OrliczError):
    """A quotient with an underflowed or vanishing denominator."""


class ConfigError(OrliczError):
    """Malformed run configuration (bad key, bad value, bad file)."""
