"""Exception hierarchy.

Every error raised by the package derives from :class:`DistClustError`.
Input problems additionally subclass ``ValueError`` and numerical failures
subclass ``ArithmeticError`` so callers (and the CLI exit codes) can tell
them apart without importing each class.
"""


class DistClustError(Exception):
    """Base class for all package errors."""


class InputError(DistClustError, ValueError):
    """Malformed or inconsistent input."""


class NumericsError(DistClustError, ArithmeticError):
    """A numerical routine could not produce a valid result."""


class NotSquare(InputError):
    pass


class NotSymmetric(InputError):
    pass


class NotPSD(NumericsError):
    pass


class DimMismatch(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class TooFewSamples(InputError):
    pass


class NonPositivePrice(InputError):
    pass


class KTooLarge(InputError):
    pass


class EmptyCluster(InputError):
    pass


class LengthMismatch(InputError):
    pass


class SchemaError(InputError):
    pass


class InsufficientDays(InputError):
    """A (station, year, month) has fewer than 28 usable rows."""

    def __init__(self, station, year, month, found):
        self.station = station
        self.year = year
        self.month = month
        self.found = found
        super().__init__(
            f"station {station!r} year {year} month {month}: "
            f"{found} valid rows, need 28"
        )


class TooFewRows(InputError):
    pass


class UnknownTicker(InputError):
    def __init__(self, ticker):
        self.ticker = ticker
        super().__init__(f"ticker {ticker!r} has no ground-truth class")


class SingularIterate(NumericsError):
    pass


class NoConvergence(NumericsError):
    pass
