"""Exception types raised by kronrod."""


class KronRodError(Exception):
    """Base class for all library errors."""


class ConfigError(KronRodError, ValueError):
    """Invalid or inconsistent configuration."""


class InvalidCardinalityError(KronRodError, ValueError):
    """Constellation size is not a power of two >= 2."""


class DegenerateInputError(KronRodError, ValueError):
    """Input carries no usable signal (e.g. an all-zero Gramian)."""


class PilotErasureError(KronRodError):
    """The pilot entry of a branch estimate vanished, so the scale is unresolvable."""


class InvalidSymbolError(KronRodError, ValueError):
    """A symbol is not a point of the constellation it was demapped against."""


class ExtrapolationError(KronRodError, ValueError):
    """A BER curve does not bracket the requested target."""
