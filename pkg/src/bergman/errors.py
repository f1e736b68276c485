"""Exception hierarchy shared across the package."""


class BergmanError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(BergmanError, ValueError):
    """Operands live in different ambient dimensions."""


class DomainError(BergmanError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ParseError(BergmanError, ValueError):
    """Malformed rational string or document."""


class JetValidationError(BergmanError, ValueError):
    """A potential jet violates hermitian reality or the normal form."""

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class InsufficientJetError(BergmanError, ValueError):
    """The jet does not carry enough Taylor terms for the requested order."""


class InvariantViolation(BergmanError, RuntimeError):
    """An internal consistency check failed; indicates a bug."""


class ResourceError(BergmanError, RuntimeError):
    """Numerical work exceeded its budget or failed to converge."""
