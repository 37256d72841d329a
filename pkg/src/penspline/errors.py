"""Exception hierarchy for penspline."""


class PensplineError(Exception):
    """Base class for all penspline errors."""


class NonIncreasingKnots(PensplineError):
    """Quantile knot placement collapsed two knots (heavily tied data)."""


class DerivativeOrderTooHigh(PensplineError):
    """Requested derivative order r >= spline order m."""


class PointOutOfDomain(PensplineError):
    """Evaluation point outside [0, 1]."""


class GramianNotPositiveDefinite(PensplineError):
    """Cholesky of the Gramian failed; the design is rank deficient."""


class DimensionMismatch(PensplineError):
    """Vector length does not match the design."""


class CutoffOutOfRange(PensplineError):
    """Truncation point t outside {1, ..., d}."""


class SingularSystem(PensplineError):
    """Penalized normal equations are singular."""


class DegreesOfFreedomExhausted(PensplineError):
    """Residual variance estimator needs t < n."""


class NonPositiveInput(PensplineError):
    """A variance-like argument must be strictly positive."""


class ZeroRoughness(PensplineError):
    """b'Rb is (numerically) zero on a family that excludes the nullset."""


class RankDeficientMonomialDesign(PensplineError):
    """Fewer than q distinct design points; X_q'X_q is singular."""


class SingularPrecision(PensplineError):
    """Posterior precision matrix is not positive definite."""


class NonFiniteLogPosterior(PensplineError):
    """Numerical overflow inside the sampler."""


class EmptyChain(PensplineError):
    """ChainOutput holds no draws."""


class UnknownTestFunction(PensplineError):
    """Test-function id is not registered."""


class InvalidShape(PensplineError):
    """Hyperprior shape parameter outside its admissible range."""


class ConfigError(PensplineError):
    """Invalid experiment configuration (CLI exit code 2)."""
