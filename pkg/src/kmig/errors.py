"""Exception types raised by the kmig library."""


class KmigError(ValueError):
    """Base class for all library-specific errors."""


class DomainError(KmigError):
    """Argument outside the mathematical domain of an operation."""


class ConfigurationError(KmigError):
    """Invalid array/medium/grid/quadrature configuration."""


class ParseError(KmigError):
    """Malformed measurement or matrix file."""


class GeometryMismatchError(KmigError):
    """Measurement angles do not match the configured station grid."""


class IncompleteDataError(KmigError):
    """Required measured entries are missing."""


class AmbiguousDataError(KmigError):
    """Duplicate records for the same (emitter, receiver, frequency)."""


class CalibrationError(KmigError):
    """Source calibration cannot be carried out."""


class UnsupportedSceneError(KmigError):
    """Scene content is not supported by the requested command."""
