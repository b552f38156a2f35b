"""Exception types shared across the package."""


class LpCodesError(Exception):
    """Base class for all package-specific errors."""


class SingularMatrixError(LpCodesError):
    """A basis matrix has determinant zero where full rank is required."""


class LimitExceededError(LpCodesError):
    """A distance-set query ran past the generated limit.

    Callers that can afford it should regenerate the set with a larger
    limit and retry; the low-level operations never regrow silently.
    """


class DimensionUnsupportedError(LpCodesError):
    """The requested computation is only implemented for specific n."""


class HypothesisViolatedError(LpCodesError):
    """A family constructor was called with parameters outside its
    admissible region.  The message names the failing inequality."""
