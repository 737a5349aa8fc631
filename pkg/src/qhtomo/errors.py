"""Exception types shared across the package."""


class QhtError(Exception):
    """Base class for all package errors."""


class GridTooNarrow(QhtError):
    """A grid does not cover the effective support of the state."""


class NumericalInstability(QhtError):
    """An oscillatory quadrature cannot reach the requested accuracy."""


class EtaIsOne(QhtError):
    """The noise kernel degenerates to a point mass at eta = 1."""


class ConstructionFailed(QhtError):
    """The Wilson window failed the orthonormality check."""


class DegenerateTruncation(QhtError):
    """A truncated expansion has numerically zero norm."""


class RejectionBudgetExceeded(QhtError):
    """Rejection sampling acceptance rate collapsed; the envelope is broken."""


class ChainDiverged(QhtError):
    """The MCMC log posterior became NaN."""


class Diverging(QhtError):
    """A weighted integral failed its tail convergence check."""


class ConfigError(QhtError):
    """An experiment configuration is invalid."""
