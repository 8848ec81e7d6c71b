"""Exception hierarchy.

Input and contract violations derive from :class:`ValueError`; numeric
failures (resonance, pole proximity, non-convergence) derive from
:class:`ArithmeticError`.  The CLI maps the two families to exit codes 1 and 2.
"""


class QConnectError(Exception):
    """Base class for all package errors."""


class DomainError(QConnectError, ValueError):
    """An argument lies outside the domain of the operation."""


class ContractError(QConnectError, ValueError):
    """A documented precondition on the call itself was violated."""


class NumericFailure(QConnectError, ArithmeticError):
    """A numerical procedure could not deliver the requested accuracy."""


class PoleProximityError(NumericFailure):
    """Evaluation point too close to a pole or zero spiral."""

    def __init__(self, message, point=None, spiral=None):
        super().__init__(message)
        self.point = point
        self.spiral = spiral


class ResonanceError(NumericFailure):
    """Two exponents collide modulo ``q**Z``."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class AmbiguityError(NumericFailure):
    """Eigenvalue clustering could not be decided."""
