"""Exception hierarchy shared by the package and mapped to CLI exit codes."""


class OrliczPolarError(Exception):
    """Base class for all package errors."""


class InvalidInputError(OrliczPolarError, ValueError):
    """Malformed input: bad dimensions, violated invariants, unknown names."""


class HemisphereError(InvalidInputError):
    """Directions (or a measure) concentrated on a closed hemisphere."""


class NumericalError(OrliczPolarError, ArithmeticError):
    """A computation failed numerically (non-finite values, lost brackets)."""


class QuadratureError(NumericalError):
    """Non-finite integrand value at a quadrature node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class BracketError(NumericalError):
    """A monotone root could not be bracketed."""
