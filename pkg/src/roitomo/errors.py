"""Exception types shared across the package."""


class GeometryError(ValueError):
    """A geometric parameter does not fit the grid (support, extent, bounds)."""


class GridMismatchError(ValueError):
    """Two objects that must share a grid do not."""


class RegionError(ValueError):
    """A region is empty where a nonempty (interior) region is required."""


class ExponentError(ValueError):
    """A spectral exponent outside the admitted range was requested."""


class NotAGradientError(ValueError):
    """A vector field expected to be curl-free is not."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or self-contradictory."""


class SolverFailure(RuntimeError):
    """Iterative solve diverged; carries the partial report.

    Attributes
    ----------
    report : object
        The SolveReport accumulated up to the failure.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
