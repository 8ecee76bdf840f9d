"""Truncated power-series algebra for fractional filters.

All filters are represented as 1-D float arrays ``c`` holding the first
``n`` coefficients of a power series ``c(s) = sum_j c_j s^j``.  Filtering is
one-sided and truncated at the start of the sample, i.e. the pre-sample is
taken to be zero.
"""

import numpy as np
from scipy.linalg import toeplitz

from .errors import NonInvertibleSeriesError


def _check_n(n):
    n = int(n)
    if n < 1:
        raise ValueError(f"number of coefficients must be >= 1, got {n}")
    return n


def delta_coeffs(d, n):
    """Coefficients of ``(1 - s)^(-d)``.

    Parameters
    ----------
    d : float
        Memory order. ``delta_coeffs(-d, n)`` gives the differencing filter.
    n : int
        Number of coefficients.

    Returns
    -------
    ndarray of shape (n,)
        ``c_j = Gamma(j + d) / (Gamma(d) Gamma(j + 1))`` computed by the
        recurrence ``c_j = c_{j-1} (j - 1 + d) / j``. For ``d = -m`` with ``m``
        a nonnegative integer the entries beyond ``m`` are exactly zero.
    """
    n = _check_n(n)
    d = float(d)
    if not np.isfinite(d):
        raise ValueError("memory order must be finite")
    j = np.arange(1, n, dtype=float)
    c = np.empty(n)
    c[0] = 1.0
    c[1:] = np.cumprod((j - 1.0 + d) / j)
    return c


def log_coeffs(n):
    """Coefficients of ``-log(1 - s) = sum_{j>=1} s^j / j``."""
    n = _check_n(n)
    c = np.zeros(n)
    c[1:] = 1.0 / np.arange(1, n)
    return c


def convolve(a, b, n):
    """Cauchy product of two coefficient sequences, truncated to ``n`` terms."""
    n = _check_n(n)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("coefficient sequences must be nonempty")
    out = np.convolve(a[:n], b[:n])[:n]
    if out.size < n:
        out = np.concatenate([out, np.zeros(n - out.size)])
    return out


def series_inverse(a, n):
    """Reciprocal power series ``b`` with ``a(s) b(s) = 1`` to ``n`` terms."""
    n = _check_n(n)
    a = np.asarray(a, dtype=float)
    if a.size == 0 or a[0] == 0.0:
        raise NonInvertibleSeriesError("leading coefficient is zero")
    a = np.concatenate([a[:n], np.zeros(max(0, n - a.size))])
    b = np.zeros(n)
    b[0] = 1.0 / a[0]
    # only the nonzero tail of `a` contributes to each step
    k_max = np.flatnonzero(a)[-1]
    for j in range(1, n):
        k = min(j, k_max)
        if k == 0:
            break
        b[j] = -np.dot(a[1:k + 1], b[j - 1::-1][:k]) / a[0]
    return b


def apply_filter(c, x):
    """Truncated one-sided filter ``out_t = sum_{j=0}^{t-1} c_j x_{t-j}``.

    ``c`` is zero-extended if shorter than ``x``. ``x`` may be 2-D, in which
    case each column is filtered.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] == 0:
        raise ValueError("cannot filter an empty series")
    n = x.shape[0]
    c = np.asarray(c, dtype=float)[:n]
    if x.ndim == 1:
        return np.convolve(c, x)[:n]
    return filter_matrix(c, n) @ x


def filter_matrix(c, n):
    """Lower-triangular Toeplitz matrix ``T`` with ``T @ x == apply_filter(c, x)``."""
    c = np.asarray(c, dtype=float)[:n]
    if c.size < n:
        c = np.concatenate([c, np.zeros(n - c.size)])
    return toeplitz(c, np.zeros(n))
