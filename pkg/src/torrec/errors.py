"""Exception and warning types raised across the package."""

from __future__ import annotations


class TorrecError(Exception):
    """Base class for all package errors."""


class HyperbolicityError(TorrecError, ValueError):
    """The matrix violates the hyperbolicity hypotheses.

    ``reason`` is a short human-readable explanation such as
    ``"eigenvalue on unit circle"``.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class UnsupportedMatrix(TorrecError, ValueError):
    """Matrix shape or structure outside the supported families."""


class MatrixSyntaxError(TorrecError, ValueError):
    """Malformed matrix literal: bad syntax, ragged rows or non-integer entries."""


class SingularError(TorrecError, ArithmeticError):
    """``A^n - I`` is singular."""


class CapExceeded(TorrecError):
    """Listing requested for more points than the cap allows.

    The structure-only result (count and Smith denominators) is attached as
    ``structure``.
    """

    def __init__(self, count: int, cap: int, structure=None):
        super().__init__(f"{count} points exceed listing cap {cap}")
        self.count = count
        self.cap = cap
        self.structure = structure


class OracleTooLarge(TorrecError):
    """Brute-force oracle refused: the scan would be too large."""


class OddPowerWithNegativeEigenvalue(TorrecError, ValueError):
    """Component geometry needs even n when an eigenvalue is negative."""


class HypothesisError(TorrecError, ValueError):
    """Parameters fall outside the stated hypotheses of a formula."""


class DomainError(TorrecError, ValueError):
    """A denominator of a candidate expression is not positive."""


class RegimeError(TorrecError, ValueError):
    """Parameters sit on the boundary between two covering regimes."""


class BudgetExceeded(TorrecError):
    """Estimated work exceeds the configured budget."""


class InsufficientSamples(TorrecError):
    """Too few Monte-Carlo hits to fit an exponent."""


class RationalInput(TorrecError, ValueError):
    """A rational number was given where an irrational one is required."""


class ResolutionWarning(UserWarning):
    """The chosen scale window does not resolve some components."""
