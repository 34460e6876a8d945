"""Exception hierarchy shared by every module."""


class N2CosetError(Exception):
    """Base class. Subclasses carry an exit code for the command line."""

    exit_code = 1


class MathError(N2CosetError):
    """A guarded mathematical failure (bad arguments, non-convergence)."""

    exit_code = 2


class NonInvertibleLeadingTerm(MathError):
    pass


class NonIntegralSignExponent(MathError):
    pass


class NonTerminating(MathError):
    pass


class LabelOutOfRange(MathError):
    pass


class ParityMismatch(MathError):
    pass


class RegimeMismatch(MathError):
    pass


class RegimeViolation(MathError):
    pass


class DivergentResolution(MathError):
    pass


class NoKnownExactRule(N2CosetError):
    exit_code = 3


class LabelParseError(N2CosetError):
    exit_code = 64

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class TruncationError(MathError):
    """A comparison or extraction asked for coefficients past the reliable order."""
