"""Exception hierarchy shared by every relmech module."""


class RelmechError(Exception):
    """Base class for all errors raised by relmech."""


class DegenerateMetric(RelmechError):
    pass


class LightlikeVelocity(RelmechError):
    """Raised when |g_ij xdot^i xdot^j| is too small to normalise by."""


class ZeroSectionOrLightlike(LightlikeVelocity):
    pass


class ClockStalls(RelmechError):
    """A coordinate clock f has fdot ~ 0 somewhere along the curve."""


class StepSizeUnderflow(RelmechError):
    pass


class DomainError(RelmechError, ValueError):
    pass


class ParseError(RelmechError):
    """Syntax error in an expression.

    ``offset`` is a 1-based character position; end of input is reported as
    ``len(src) + 1``.
    """

    def __init__(self, offset, expected, found):
        self.offset = offset
        self.expected = expected
        self.found = found
        super().__init__(f"at offset {offset}: expected {expected}, found {found}")


class VelocityNotAllowed(ParseError):
    pass


class EvalError(RelmechError, ArithmeticError):
    pass


class DivisionByZero(EvalError):
    pass


class ScenarioError(RelmechError, ValueError):
    pass
