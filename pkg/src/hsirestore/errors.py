"""Exception types raised across the package."""


class HSIRestoreError(Exception):
    """Base class for all package errors."""


class ImaginaryResidueTooLarge(HSIRestoreError, ArithmeticError):
    pass


class NumericalFailure(HSIRestoreError, ArithmeticError):
    pass


class DomainError(HSIRestoreError, ValueError):
    pass


class DimensionMismatch(HSIRestoreError, ValueError):
    pass


class PatchLargerThanImage(HSIRestoreError, ValueError):
    pass


class IndexOutOfRange(HSIRestoreError, IndexError):
    pass


class MissingWindow(HSIRestoreError, ValueError):
    pass


class BandRangeOutOfBounds(HSIRestoreError, ValueError):
    pass


class UnknownCase(HSIRestoreError, ValueError):
    pass


class ImageTooSmall(HSIRestoreError, ValueError):
    pass


class ZeroBandMean(HSIRestoreError, ValueError):
    pass


class ZeroSpectrum(HSIRestoreError, ValueError):
    pass


class BadMagic(HSIRestoreError, ValueError):
    pass


class TruncatedFile(HSIRestoreError, ValueError):
    pass


class NonFiniteValue(HSIRestoreError, ValueError):
    pass


class ConfigError(HSIRestoreError, ValueError):
    """Bad key or value in a run configuration."""
