"""Exception hierarchy shared by every module."""


class ScreeningError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ScreeningError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(ScreeningError, ValueError):
    """A structural assumption required by an operation does not hold."""


class CapacityError(ScreeningError):
    """A computed transfer does not fit on the transfer grid.

    Carries the offending type index and transfer so the caller can
    suggest a larger bound.
    """

    def __init__(self, message, index=None, transfer=None, bound=None):
        super().__init__(message)
        self.index = index
        self.transfer = transfer
        self.bound = bound


class CapRefusal(ScreeningError):
    """An exhaustive computation was refused because it exceeds its cap."""


class InvariantViolation(ScreeningError, AssertionError):
    """An internal invariant that the theory guarantees was observed broken."""
