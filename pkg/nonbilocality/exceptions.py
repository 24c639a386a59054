"""Exceptions raised by the nonbilocality package."""

from __future__ import annotations


class NonbilocalError(Exception):
    """Base error for the package."""


class InvalidStateError(NonbilocalError, ValueError):
    """A ket or density operator violates its invariants."""


class NotPositiveError(InvalidStateError):
    """An operator has an eigenvalue below the PSD tolerance."""


class DimensionMismatchError(NonbilocalError, ValueError):
    """Operands have incompatible subsystem dimensions or index sets."""


class DimensionCapError(NonbilocalError, ValueError):
    """The total Hilbert-space dimension exceeds the supported cap."""


class InvalidMeasurementError(NonbilocalError, ValueError):
    """Projectors are not a complete orthogonal set, or have the wrong rank."""


class InvalidLambdaError(NonbilocalError, ValueError):
    """A coefficient matrix of the wrong kind was supplied."""


class DegenerateMarginalError(NonbilocalError):
    """A theorem requiring a nondegenerate marginal was given a degenerate one."""


class StateSpecError(NonbilocalError):
    """A state file could not be parsed or validated."""

    def __init__(
        self, message: str, *, field: str | None = None, line: int | None = None
    ) -> None:
        """Initialize the error with optional location details."""
        super().__init__(message)
        self.field = field
        self.line = line

    def __str__(self) -> str:
        """Return the message prefixed by its location."""
        location = []
        if self.line is not None:
            location.append(f"line {self.line}")
        if self.field is not None:
            location.append(f"field '{self.field}'")
        if not location:
            return super().__str__()
        return f"{', '.join(location)}: {super().__str__()}"


class InvalidConfigError(NonbilocalError, ValueError):
    """Optimizer options failed validation."""
