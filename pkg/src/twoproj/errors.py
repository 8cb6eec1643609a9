"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 2);
``InvariantViolation`` signals that a mathematical identity failed to hold
numerically (CLI exit code 3).
"""


class TwoProjError(Exception):
    pass


class ValidationError(TwoProjError, ValueError):
    pass


class NotSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotAProjection(ValidationError):
    pass


class AmbientMismatch(ValidationError):
    pass


class FrameInconsistency(ValidationError):
    pass


class SpecMismatch(ValidationError):
    pass


class AngleTooLarge(ValidationError):
    pass


class UnknownScenario(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class NoConvergence(TwoProjError):
    pass


class InvariantViolation(TwoProjError):
    pass


class HypothesisNotMet(TwoProjError):
    """A lower-bound hypothesis fails; informational, raised only on request."""
