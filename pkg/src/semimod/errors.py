"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class SemimodError(Exception):
    """Base class for recoverable errors raised by this package."""


class StructuralError(SemimodError, ValueError):
    """Malformed input: wrong table shape, unknown label, bad JSON field."""


class UnsupportedOperation(SemimodError):
    """The operation needs an enumerable carrier or module and did not get one."""


class PreconditionError(SemimodError, ValueError):
    """A theorem-level operation was called outside its hypotheses."""


class BudgetExceeded(SemimodError):
    def __init__(self, message: str, partial_count: int):
        super().__init__(f"{message} (reached {partial_count} elements)")
        self.partial_count = partial_count


class MultiplicityError(SemimodError):
    """Several direct complements exist; only possible when zero sums are present."""

    def __init__(self, message: str, candidates):
        super().__init__(message)
        self.candidates = list(candidates)


class InvariantViolation(AssertionError):
    """A recomputed postcondition failed. Indicates a bug or a false theorem, never bad input."""
