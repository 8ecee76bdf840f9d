"""Root-n consistent starting values for the one-step estimators.

Two estimators are provided.  :func:`css_fit` minimizes the mean squared
truncated residual; :func:`tapered_whittle_fit` minimizes a frequency-domain
Whittle objective computed from a cosine-bell tapered periodogram, which
stays consistent for nonstationary memory values.  Both locate the memory
parameter by grid search over a fixed interval followed by bounded
refinement within the best grid cell.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import DegenerateDataError, EstimationFailed
from .model import ModelSpec, ar_coeffs
from .residuals import trend_matrix

GRID_LO, GRID_HI, GRID_STEP = -0.4, 1.75, 0.01
BOUNDARY_TOL = 1e-4
_BAD = 1e300


@dataclass
class InitialFit:
    theta1_tilde: np.ndarray
    theta2_tilde: np.ndarray
    sigma2_tilde: float
    objective_value: float
    method: str
    hit_boundary: bool
    design: object = None
    grid: np.ndarray = field(default=None, repr=False)
    profile: np.ndarray = field(default=None, repr=False)

    @property
    def xi(self):
        return float(self.theta1_tilde[0])

    @property
    def sigma_tilde(self):
        return float(np.sqrt(self.sigma2_tilde))


def _check_series(y, n_min=2):
    y = np.asarray(y, dtype=float).ravel()
    if y.size < n_min:
        raise DegenerateDataError(f"degenerate series: need at least {n_min} observations, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise DegenerateDataError("degenerate series: non-finite observations")
    if np.ptp(y) == 0.0:
        raise DegenerateDataError("degenerate series: all observations are equal")
    return y


def _grid(lo, hi, step):
    if not lo < hi:
        raise ValueError("grid interval must satisfy lo < hi")
    if not step > 0:
        raise ValueError("grid step must be positive")
    k = int(np.floor((hi - lo) / step + 1e-9))
    g = lo + step * np.arange(k + 1)
    if hi - g[-1] > 1e-9:
        g = np.append(g, hi)
    return g


def _search_xi(profile_fn, lo, hi, step):
    """Grid search then bounded refinement of a profiled objective in ``xi``.

    ``profile_fn(xi, start, tight)`` returns ``(value, nu)``.  The grid and
    the refinement use loose inner tolerances; the winner is polished with
    ``tight=True``.  Ties on the grid go to the smallest ``xi``.
    """
    grid = _grid(lo, hi, step)
    values = np.empty(grid.size)
    nus = []
    start = None
    for i, xi in enumerate(grid):
        v, nu = profile_fn(xi, start, False)
        values[i] = v if np.isfinite(v) else np.inf
        nus.append(nu)
        start = nu
    if not np.any(np.isfinite(values)):
        raise EstimationFailed("objective is non-finite at every grid point")
    i = int(np.argmin(values))
    best_xi, best_v, best_nu = grid[i], values[i], nus[i]
    a, b = max(lo, grid[i] - step), min(hi, grid[i] + step)

    def f(xi):
        v, _ = profile_fn(xi, best_nu, False)
        return v if np.isfinite(v) else _BAD

    res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-6})
    if res.fun < best_v:
        v, nu = profile_fn(float(res.x), best_nu, False)
        if v < best_v:
            best_xi, best_v, best_nu = float(res.x), v, nu
    hit = min(best_xi - lo, hi - best_xi) < BOUNDARY_TOL
    if hit:
        edge = lo if best_xi - lo < hi - best_xi else hi
        best_xi = edge
    best_v, best_nu = profile_fn(best_xi, best_nu, True)
    return best_xi, best_v, best_nu, hit, grid, values


def _profile_nu(obj, p, start, tight=True):
    """Minimize ``obj(nu)`` over short-memory coefficients from ``nu = 0``."""
    if p == 0:
        return obj(np.zeros(0)), np.zeros(0)
    x0 = np.zeros(p) if start is None else np.asarray(start, dtype=float)
    tol = {"xatol": 1e-7, "fatol": 1e-12} if tight else {"xatol": 1e-4, "fatol": 1e-8}
    res = minimize(obj, x0, method="Nelder-Mead", options={**tol, "maxiter": 400 * p})
    return float(res.fun), np.asarray(res.x)


def _ols_detrend(y, design):
    """Least-squares trend coefficients (with intercept) and detrended series."""
    if design is None or design.p2 == 0:
        return np.zeros(0), y
    z2 = trend_matrix(design.chi, y.size)
    X = np.column_stack([np.ones(y.size), z2])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef[1:], y - z2 @ coef[1:]


def css_fit(y, design=None, spec=None, grid_lo=GRID_LO, grid_hi=GRID_HI, grid_step=GRID_STEP):
    """Conditional-sum-of-squares fit.

    For each candidate ``xi`` the trend coefficients are profiled out by least
    squares of the filtered series on the filtered trend columns, and the
    short-memory coefficients by Nelder-Mead started at zero.

    Returns
    -------
    InitialFit
        ``sigma2_tilde`` is the minimized mean squared residual.
    """
    spec = spec or ModelSpec()
    y = _check_series(y)
    n = y.size
    # work on the standardized series so optimizer tolerances are scale-free
    scale = float(np.std(y))
    y = y / scale
    z2 = trend_matrix(design.chi, n) if design is not None and design.p2 else np.zeros((n, 0))
    p = spec.p11 + spec.p12

    def inner(xi, nu):
        try:
            spec.check_roots(nu)
        except ValueError:
            return _BAD, None
        alpha = ar_coeffs(np.concatenate([[xi], nu]), spec, n)
        ey = np.convolve(alpha, y)[:n]
        ey -= ey.mean()
        if z2.shape[1]:
            ez = np.column_stack([np.convolve(alpha, z)[:n] for z in z2.T])
            ez -= ez.mean(axis=0)
            coef, *_ = np.linalg.lstsq(ez, ey, rcond=None)
            ey = ey - ez @ coef
        else:
            coef = np.zeros(0)
        return float(np.mean(ey * ey)), coef

    def profile(xi, start, tight):
        return _profile_nu(lambda nu: inner(xi, nu)[0], p, start, tight)

    xi, value, nu, hit, grid, values = _search_xi(profile, grid_lo, grid_hi, grid_step)
    value, theta2 = inner(xi, nu)
    if not (np.isfinite(value) and value > 0):
        raise EstimationFailed("CSS objective is not positive at the optimum")
    value *= scale**2
    theta2 = np.asarray(theta2) * scale
    values = values * scale**2
    return InitialFit(np.concatenate([[xi], nu]), np.asarray(theta2), value, value,
                      "css", hit, design, grid, values)


def cosine_bell(n):
    """Taper ``h_t = (1 - cos(2 pi t / n)) / 2``, ``t = 1..n``."""
    t = np.arange(1, n + 1)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * t / n))


def tapered_periodogram(y, taper_order=2):
    """Cosine-bell tapered periodogram at every ``taper_order``-th Fourier frequency.

    Returns ``(lam, I)`` with ``I(lam) = |sum_t h_t y_t e^{i t lam}|^2 / (2 pi sum_t h_t^2)``
    so that ``I`` estimates the spectral density.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    h = cosine_bell(n)
    dft = np.fft.fft(h * y)
    j = np.arange(taper_order, (n - 1) // 2 + 1, taper_order)
    lam = 2.0 * np.pi * j / n
    I = np.abs(dft[j]) ** 2 / (2.0 * np.pi * np.sum(h * h))
    return lam, I


def _log_short_memory_sd(lam, spec, nu):
    """``log |beta(e^{i lam}; nu)|^2`` with ``beta = MA / AR``."""
    if nu.size == 0:
        return np.zeros_like(lam)
    z = np.exp(-1j * lam)
    ma = np.polyval(spec.ma_poly(nu)[::-1], z)
    ar = np.polyval(spec.ar_poly(nu)[::-1], z)
    return 2.0 * (np.log(np.abs(ma)) - np.log(np.abs(ar)))


def tapered_whittle_fit(y, spec=None, taper_order=2, design=None,
                        grid_lo=GRID_LO, grid_hi=GRID_HI, grid_step=GRID_STEP):
    """Whittle fit from a cosine-bell tapered periodogram.

    The objective is ``log(mean I/k) + mean log k`` with
    ``k(lam) = |1 - e^{i lam}|^{-2 xi} |beta(e^{i lam})|^2``.  Trend terms in
    ``design`` are removed by least squares first and their coefficients are
    reported as ``theta2_tilde``.
    """
    spec = spec or ModelSpec()
    y = _check_series(y)
    n = y.size
    if n < 32:
        raise ValueError(f"tapered Whittle fit needs n >= 32, got {n}")
    theta2, x = _ols_detrend(y, design)
    lam, I = tapered_periodogram(x, taper_order)
    if lam.size < 2:
        raise EstimationFailed("too few frequencies for the Whittle objective")
    log_d = np.log(np.abs(2.0 * np.sin(lam / 2.0)))
    mean_log_d = log_d.mean()
    p = spec.p11 + spec.p12

    def inner(xi, nu):
        try:
            spec.check_roots(nu)
        except ValueError:
            return _BAD
        log_k = -2.0 * xi * log_d + _log_short_memory_sd(lam, spec, nu)
        ratio = np.mean(I * np.exp(-log_k))
        if not ratio > 0:
            return _BAD
        return float(np.log(ratio) + np.mean(log_k))

    if p == 0:
        # vectorized fast path for the pure fractional model
        grid = _grid(grid_lo, grid_hi, grid_step)
        w = np.exp(2.0 * np.outer(grid, log_d))
        values = np.log((w * I).mean(axis=1)) - 2.0 * grid * mean_log_d
        i = int(np.argmin(values))
        xi, value = grid[i], values[i]
        a, b = max(grid_lo, xi - grid_step), min(grid_hi, xi + grid_step)
        res = minimize_scalar(lambda v: inner(v, np.zeros(0)), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-6})
        if res.fun < value:
            xi, value = float(res.x), float(res.fun)
        hit = min(xi - grid_lo, grid_hi - xi) < BOUNDARY_TOL
        if hit:
            xi = grid_lo if xi - grid_lo < grid_hi - xi else grid_hi
            value = inner(xi, np.zeros(0))
        nu = np.zeros(0)
    else:
        def profile(xi, start, tight):
            return _profile_nu(lambda nu: inner(xi, nu), p, start, tight)

        xi, value, nu, hit, grid, values = _search_xi(profile, grid_lo, grid_hi, grid_step)

    log_k = -2.0 * xi * log_d + _log_short_memory_sd(lam, spec, nu)
    sigma2 = float(2.0 * np.pi * np.mean(I * np.exp(-log_k)))
    if not (np.isfinite(sigma2) and sigma2 > 0):
        raise EstimationFailed("Whittle scale estimate is not positive")
    return InitialFit(np.concatenate([[xi], nu]), theta2, sigma2, float(value),
                      "tapered_whittle", bool(hit), design, grid, values)


def initial_fit(y, method="whittle", design=None, spec=None, **kwargs):
    """Dispatch to :func:`css_fit` or :func:`tapered_whittle_fit` by name."""
    if method in ("css",):
        return css_fit(y, design, spec, **kwargs)
    if method in ("whittle", "tapered_whittle"):
        return tapered_whittle_fit(y, spec, design=design, **kwargs)
    raise ValueError(f"unknown initial estimator {method!r}")
