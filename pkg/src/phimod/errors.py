"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class;
anything else is a plain bug and surfaces as a standard Python exception.
"""


class PhimodError(Exception):
    """Base class for all package-specific errors."""


class FieldMismatch(PhimodError):
    """Operands live over different coefficient fields."""


class DivisionByZero(PhimodError, ZeroDivisionError):
    """Inversion of a structurally zero element."""


class InsufficientPrecision(PhimodError):
    """A required digit lies beyond the certified window of some operand.

    Raised instead of guessing: the caller can retry at higher precision.
    """


class Singular(PhimodError):
    """A matrix that must be invertible is not (certified)."""


class HypothesisViolated(PhimodError):
    """An input fails a stated precondition (congruence level, pole bound)."""


class IterateEscaped(PhimodError):
    """An iterate left its guaranteed congruence subgroup.

    This never happens for valid inputs; seeing it means an implementation
    or precision bug upstream.
    """


class BoxTooLarge(PhimodError):
    """An enumeration was refused because its estimated size exceeds the cap."""

    def __init__(self, estimate, limit):
        super().__init__(f"enumeration size estimate {estimate} exceeds limit {limit}")
        self.estimate = estimate
        self.limit = limit

    def __reduce__(self):
        # keeps the exception picklable across process pool workers
        return (BoxTooLarge, (self.estimate, self.limit))


class ParseError(PhimodError):
    """Malformed series literal or job document."""


class ValidationError(PhimodError):
    """Structurally valid input with inconsistent or out-of-range content."""
