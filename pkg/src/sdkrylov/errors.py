"""Exception hierarchy shared by all modules."""


class SdKrylovError(Exception):
    """Base class for library errors."""


class NonSquare(SdKrylovError, ValueError):
    pass


class DimensionMismatch(SdKrylovError, ValueError):
    pass


class InvalidParameter(SdKrylovError, ValueError):
    pass


class Singular(SdKrylovError, ArithmeticError):
    pass


class NotPositiveDefinite(SdKrylovError, ArithmeticError):
    """Raised when a Cholesky pivot falls below the pivot floor.

    ``index`` is the failing row in the caller's (unpermuted) numbering.
    """

    def __init__(self, index, message=None):
        self.index = int(index)
        super().__init__(message or f"matrix is not positive definite (pivot {self.index})")


class NoConvergence(SdKrylovError, RuntimeError):
    pass


class InnerSolveFailed(SdKrylovError, RuntimeError):
    """Nested CG for an inner system hit its iteration cap."""


class Diverged(SdKrylovError, RuntimeError):
    """Stationary iteration blew up; the partial report is attached."""

    def __init__(self, report, message="stationary iteration diverged"):
        self.report = report
        super().__init__(message)
