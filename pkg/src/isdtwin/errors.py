"""Exception hierarchy shared across the package."""


class IsdError(Exception):
    """Base class for all package errors."""


class DomainError(IsdError):
    """A physical quantity left its valid domain (e.g. dielectric fully compressed)."""


class ConfigError(IsdError):
    """Invalid, inconsistent, or unknown configuration."""


class FitError(IsdError):
    """A characterization fit cannot proceed on the given data."""


class DetectionError(IsdError):
    """An expected signal feature could not be located in a trace."""


class TraceFormatError(IsdError):
    """A trace or sample file is malformed."""
