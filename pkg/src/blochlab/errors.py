"""Exception types raised across blochlab."""


class BlochLabError(Exception):
    """Base class for all library errors."""


class SpecParseError(BlochLabError, ValueError):
    """Malformed weight or symbol spec string.

    ``position`` is the character offset of the offending token.
    """

    def __init__(self, message, text=None, position=None):
        if text is not None and position is not None:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)
        self.text = text
        self.position = position


class DomainError(BlochLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(BlochLabError, ValueError):
    """An operation was called outside its documented range of validity."""


class UnsupportedError(BlochLabError, TypeError):
    """The operation does not support this kind of input."""


class EvaluationError(BlochLabError, ArithmeticError):
    """A user-supplied evaluator failed or produced a non-finite value."""

    def __init__(self, message, point=None):
        if point is not None:
            message = f"{message} (at z = {point!r})"
        super().__init__(message)
        self.point = point


class SelfMapRefused(BlochLabError):
    """The symbol failed self-map validation and ``force`` was not set."""
