"""Exception types shared across the package."""
from __future__ import annotations


class DnlsLabError(Exception):
    """Base class for all package errors."""


class ContractViolation(DnlsLabError):
    """An operation was called with a value violating its representation
    or domain contract."""


class DomainError(DnlsLabError):
    """Parameter outside the mathematically meaningful domain."""


class MassConstraintError(DnlsLabError):
    """Requested initial data violates the smallness condition on the mass."""


class BlowUpError(DnlsLabError):
    """Time integration produced NaN/overflow amplitudes."""

    def __init__(self, message: str, last_valid_time: float):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class SingularityError(DnlsLabError):
    """Four-linear multiplier evaluated at a doubly singular point where the
    numerator residual does not vanish."""


class BudgetError(DnlsLabError):
    """A nested hyperplane sum would exceed the configured cost budget."""


class GenerationError(DnlsLabError):
    """Tuple sampler failed to realise the requested magnitude pattern."""


class RegressionError(DnlsLabError):
    """An empirical constant exceeded its frozen fixture."""
