"""Trend regressors and truncated autoregressive residuals.

Trend exponents are classified against the memory parameter ``xi``:
exponents below ``xi - 1/2`` are negligible and dropped, an exponent equal
to ``xi`` is absorbed by mean correction, and the remainder (``chi``) form
the estimated trend block ``z2``.
"""

from dataclasses import dataclass

import numpy as np

from .fracfilter import filter_matrix
from .model import ar_coeffs, ar_deriv_coeffs

EXPONENT_TOL = 1e-10


@dataclass(frozen=True)
class RegressionDesign:
    exponents: tuple
    xi: float
    T1: tuple
    T2: tuple
    T3: tuple

    @property
    def chi(self):
        return tuple(self.exponents[j] for j in self.T3)

    @property
    def p2(self):
        return len(self.T3)


def classify(exponents, xi):
    """Build a :class:`RegressionDesign` for trend exponents given memory ``xi``."""
    tau = tuple(float(t) for t in exponents)
    if any(b <= a for a, b in zip(tau, tau[1:])):
        raise ValueError("regression exponents must be strictly increasing")
    T1, T2, T3 = [], [], []
    for j, t in enumerate(tau):
        if abs(t - xi) <= EXPONENT_TOL:
            T2.append(j)
        elif t < xi - 0.5 - EXPONENT_TOL:
            T1.append(j)
        else:
            T3.append(j)
    return RegressionDesign(tau, float(xi), tuple(T1), tuple(T2), tuple(T3))


def full_design(exponents):
    """Design treating every exponent as an estimated trend (used before ``xi`` is known)."""
    d = classify(exponents, -np.inf) if len(exponents) else classify((), 0.0)
    return RegressionDesign(d.exponents, np.nan, (), (), tuple(range(len(d.exponents))))


def trend_matrix(exponents, n):
    """Columns ``t^tau_j`` for ``t = 1..n``."""
    t = np.arange(1, n + 1, dtype=float)
    exponents = np.asarray(exponents, dtype=float).reshape(1, -1)
    return t[:, None] ** exponents


def regressors(exponents, xi, n):
    """Return ``(z, design, z2)`` for the given exponents and memory value."""
    design = classify(exponents, xi)
    z = trend_matrix(design.exponents, n)
    z2 = z[:, list(design.T3)]
    return z, design, z2


def _detrended(theta2, y, z2):
    y = np.asarray(y, dtype=float)
    theta2 = np.asarray(theta2, dtype=float).ravel()
    if theta2.size != z2.shape[1]:
        raise ValueError(f"theta2 has {theta2.size} entries but the design has {z2.shape[1]} trend columns")
    return y - z2 @ theta2 if theta2.size else y


def _z2(design, n):
    return trend_matrix(design.chi, n) if design is not None else np.zeros((n, 0))


def residuals(theta1, theta2, y, design, spec):
    """Truncated AR residuals ``e_t`` and their mean-corrected version ``E_t``.

    Parameters
    ----------
    theta1 : array_like
        ``(xi, nu)``.
    theta2 : array_like
        Trend coefficients matching ``design.chi``.
    y : array_like
        Observations ``y_1..y_n``.
    design : RegressionDesign or None
    spec : ModelSpec

    Returns
    -------
    e, E : ndarray
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 2:
        raise ValueError("need at least two observations")
    x = _detrended(theta2, y, _z2(design, n))
    e = np.convolve(ar_coeffs(theta1, spec, n), x)[:n]
    return e, e - e.mean()


def residual_derivs(theta1, theta2, y, design, spec):
    """Mean-corrected residual derivatives.

    Returns
    -------
    E1 : ndarray of shape (n, p1)
        Derivatives with respect to ``(xi, nu)``.
    E2 : ndarray of shape (n, p2)
        Derivatives with respect to the trend coefficients.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 2:
        raise ValueError("need at least two observations")
    z2 = _z2(design, n)
    x = _detrended(theta2, y, z2)
    d_rows = ar_deriv_coeffs(theta1, spec, n)
    e1 = np.column_stack([np.convolve(row, x)[:n] for row in d_rows])
    if z2.shape[1]:
        e2 = -filter_matrix(ar_coeffs(theta1, spec, n), n) @ z2
    else:
        e2 = np.zeros((n, 0))
    return e1 - e1.mean(axis=0), e2 - e2.mean(axis=0)


def residual_bundle(theta1, theta2, y, design, spec):
    """``(E, E1, E2)`` in one pass, sharing the filter coefficients."""
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 2:
        raise ValueError("need at least two observations")
    z2 = _z2(design, n)
    x = _detrended(theta2, y, z2)
    alpha = ar_coeffs(theta1, spec, n)
    d_rows = ar_deriv_coeffs(theta1, spec, n)
    e = np.convolve(alpha, x)[:n]
    e1 = np.column_stack([np.convolve(row, x)[:n] for row in d_rows])
    e2 = -filter_matrix(alpha, n) @ z2 if z2.shape[1] else np.zeros((n, 0))
    return e - e.mean(), e1 - e1.mean(axis=0), e2 - e2.mean(axis=0)
