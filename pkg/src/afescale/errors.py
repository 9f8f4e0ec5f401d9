"""Exception types shared across the package."""

from __future__ import annotations


class AfeScaleError(Exception):
    """Base class for all errors raised by afescale."""


class DomainError(AfeScaleError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InfeasibleDesignError(AfeScaleError):
    """A requirement cannot be met by any physical front end (e.g. F <= 1)."""


class ValidityError(AfeScaleError):
    """A scaling factor violates the validity range of a scaling law.

    The ``constraint`` attribute names the violated range so reports can
    quote it verbatim.
    """

    def __init__(self, message: str, constraint: str):
        super().__init__(f"{message} (violates {constraint})")
        self.constraint = constraint


class ConvergenceError(AfeScaleError):
    """A numerical optimizer failed to converge within its iteration budget."""


class OutOfModelError(AfeScaleError):
    """An input falls in a region the model explicitly does not cover."""
