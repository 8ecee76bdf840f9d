"""Exception types raised by the estimation routines."""

import numpy as np


class NonInvertibleSeriesError(ValueError):
    """Power series with zero leading coefficient has no reciprocal."""


class DegenerateDataError(ValueError):
    """Observed series carries no information (empty or constant)."""


class EstimationFailed(RuntimeError):
    """Optimizer or objective evaluation failed to produce an estimate."""


class SingularBasisError(np.linalg.LinAlgError):
    """Score basis matrix W is numerically singular."""

    def __init__(self, L, rcond):
        self.L = L
        self.rcond = rcond
        super().__init__(f"singular score basis at L={L} (rcond={rcond:.3g})")


class DesignDegenerateError(np.linalg.LinAlgError):
    """Derivative cross-product matrix R is singular."""


class InvalidFamilyError(ValueError):
    """Parametric innovation family produced non-finite log-density."""


class InvalidRestrictionError(ValueError):
    """Wald restriction has singular covariance or wrong shape."""


class CellFailedError(RuntimeError):
    """Every replication of a Monte Carlo cell failed."""
