"""Exception types shared across the package."""


class FasdepError(Exception):
    """Base class for package-specific failures."""


class SeriesTruncationError(FasdepError):
    """A series or continued fraction hit its term budget before converging.

    Carries the partial sum so callers that can tolerate a degraded
    estimate may still inspect it.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class QuadratureError(FasdepError):
    """Adaptive quadrature exhausted its subdivision budget.

    `estimate` holds the best value reached and `error` the error bound
    at the point of failure.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NoCrossingError(FasdepError):
    """An empirical statistic is undefined because no level crossing occurred."""
