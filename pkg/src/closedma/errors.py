"""Exception hierarchy shared by all closedma modules."""


class ClosedMAError(Exception):
    """Base class for every error raised by closedma."""


class NonFiniteInputError(ClosedMAError, ValueError):
    """An input vector contains NaN or infinite entries."""


class OutsideClosedCubeError(ClosedMAError, ValueError):
    """A partial parameter lies outside [-1, 1]."""


class NotInClosedRegionError(ClosedMAError, ValueError):
    """MA coefficients lie outside the closed invertible region."""


class DegenerateVarianceError(ClosedMAError, ArithmeticError):
    """A one-step prediction variance became non-positive."""


class ZeroSeriesError(ClosedMAError, ValueError):
    """The residual sum of squares is zero (e.g. an all-zero series)."""


class NotPositiveDefiniteError(ClosedMAError, ArithmeticError):
    """Cholesky factorization of the covariance matrix failed."""


class TooShortSeriesError(ClosedMAError, ValueError):
    """The series has no more observations than the model order."""


class AllStartsFailedError(ClosedMAError, RuntimeError):
    """Every optimizer restart ended on a degenerate likelihood."""
