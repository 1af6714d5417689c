"""Exception types and result flags shared across the package."""
from enum import Enum


class InvalidArgumentError(ValueError):
    pass


class DegenerateModelError(InvalidArgumentError):
    """Both Rabi frequencies vanish: the dressed-state normalizations divide by zero."""


class SingularInformationError(ArithmeticError):
    """The QFI matrix is singular, so the simultaneous bound is undefined."""


class FormulaDiscrepancyError(ArithmeticError):
    """A closed form produced a value its definition forbids (e.g. a negative radicand)."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class Flag(str, Enum):
    """Sentinels used in place of infinities/NaN in reports and CSV cells."""

    UNBOUNDED = "unbounded"
    SINGULAR = "singular"
    DISCREPANCY = "discrepancy"

    def __str__(self):
        return self.value
