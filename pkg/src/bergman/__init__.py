"""Near-diagonal expansion of Bergman kernels from a Kähler potential jet.

Exact layer: ``multiindex``, ``polyring``, ``potential``, ``expansion``,
``solver``.  Numerical layer: ``oracle`` and ``numeric``.  ``cli`` drives both.
"""
__version__ = "0.1.0"

from .errors import (BergmanError, DimensionError, DomainError,  # noqa: F401
                     InsufficientJetError, InvariantViolation, JetValidationError,
                     ParseError, ResourceError)
