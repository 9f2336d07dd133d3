"""Exception types raised by gradedchain."""


class GradedChainError(Exception):
    """Base class for all package errors."""


class BandEdgeSingularity(GradedChainError, ValueError):
    """Evaluation requested (numerically) at a band edge where 1/sin diverges."""


class GradingOverflow(GradedChainError, OverflowError):
    """The factor xi**-(p-q) does not fit in a double."""


class ZeroModeError(GradedChainError, ZeroDivisionError):
    """A zero-frequency mode cannot be written with exp(+-i w t) coefficients."""


class NearSingularError(GradedChainError, ArithmeticError):
    """Dense resolvent is too ill-conditioned to be trusted."""


class QuadratureError(GradedChainError, ArithmeticError):
    pass


class VerificationError(GradedChainError, AssertionError):
    """A numerical cross-check exceeded its tolerance.

    The report that failed is kept on ``self.report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnsupportedMode(GradedChainError, ValueError):
    pass


class AliasingError(GradedChainError, ValueError):
    """The damped response has not decayed within the FFT window."""
