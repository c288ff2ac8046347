"""Exception types shared across the package."""


class DictselError(Exception):
    """Base class for all package errors."""


class ShapeError(DictselError, ValueError):
    """Array dimensions do not agree with the operator or model."""


class PreconditionError(DictselError, ValueError):
    """A parameter violates a documented precondition."""


class RefusalError(DictselError, RuntimeError):
    """A computation was refused because it exceeds a configured cap."""


class NumericError(DictselError, ArithmeticError):
    """Non-finite values or a numerically degenerate state was encountered."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class ZeroGradient(DictselError):
    """The support-masked gradient vanished; the caller treats this as converged."""
