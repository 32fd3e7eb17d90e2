class TrbacError(Exception):
    """Base class for errors raised by trbacminer."""


class DomainError(TrbacError, ValueError):
    """An argument lies outside the domain of an operation."""


class ParseError(TrbacError, ValueError):
    """Malformed text in one of the file or expression formats."""


class ResourceError(TrbacError):
    """An operation would exceed a configured resource cap."""


class ConfigError(TrbacError, ValueError):
    """Inconsistent or incomplete configuration."""
