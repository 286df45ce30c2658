"""Exception types shared across the package."""


class MbcError(Exception):
    """Base class for errors raised by mbclust."""


class CsvError(MbcError):
    """Malformed or unusable CSV input; the message carries row/column context."""


class DegenerateDataError(MbcError):
    """The input carries no information for the requested measure (zero denominator)."""
