"""FARIMA model orders, AR-representation filters and simulation.

The parameter vector ``theta1 = (xi, nu)`` stacks the memory parameter and
the short-memory coefficients, AR coefficients first, then MA.  The AR
polynomial is ``1 - a_1 s - ... - a_p s^p`` and the MA polynomial is
``1 + b_1 s + ... + b_q s^q``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter
from scipy.special import gamma

from .fracfilter import apply_filter, convolve, delta_coeffs, log_coeffs, series_inverse

HALF_INTEGER_TOL = 1e-8


@dataclass(frozen=True)
class ModelSpec:
    """Model orders and regression exponents.

    Parameters
    ----------
    p11 : int
        AR order.
    p12 : int
        MA order.
    regression_exponents : tuple of float
        Strictly increasing exponents ``tau_j`` of the trend terms ``t^tau_j``.
    """

    p11: int = 0
    p12: int = 0
    regression_exponents: tuple = ()

    def __post_init__(self):
        if self.p11 < 0 or self.p12 < 0:
            raise ValueError("ARMA orders must be nonnegative")
        tau = tuple(float(t) for t in self.regression_exponents)
        if any(b <= a for a, b in zip(tau, tau[1:])):
            raise ValueError("regression exponents must be strictly increasing")
        object.__setattr__(self, "regression_exponents", tau)

    @property
    def p1(self):
        return 1 + self.p11 + self.p12

    def split(self, nu):
        nu = np.asarray(nu, dtype=float).ravel()
        if nu.size != self.p11 + self.p12:
            raise ValueError(f"expected {self.p11 + self.p12} short-memory parameters, got {nu.size}")
        return nu[:self.p11], nu[self.p11:]

    def ar_poly(self, nu):
        ar, _ = self.split(nu)
        return np.concatenate([[1.0], -ar])

    def ma_poly(self, nu):
        _, ma = self.split(nu)
        return np.concatenate([[1.0], ma])

    def check_roots(self, nu):
        """Raise ``ValueError`` unless AR and MA roots lie outside the unit circle."""
        for name, poly in (("AR", self.ar_poly(nu)), ("MA", self.ma_poly(nu))):
            if poly.size > 1:
                # np.roots wants highest degree first
                roots = np.roots(poly[::-1])
                if roots.size and np.min(np.abs(roots)) <= 1.0 + 1e-10:
                    raise ValueError(f"{name} polynomial has a root on or inside the unit circle")


@dataclass(frozen=True)
class ThetaFull:
    """Full parameter point ``(xi, nu, theta2, sigma2)``."""

    xi: float
    nu: tuple = ()
    theta2: tuple = ()
    sigma2: float = 1.0

    def __post_init__(self):
        xi = float(self.xi)
        if not xi > -0.5:
            raise ValueError(f"memory parameter must exceed -1/2, got {xi}")
        frac = xi - np.floor(xi)
        if abs(frac - 0.5) <= HALF_INTEGER_TOL:
            raise ValueError(f"memory parameter {xi} is a half-integer")
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError("sigma2 must be positive and finite")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "nu", tuple(float(v) for v in np.ravel(self.nu)))
        object.__setattr__(self, "theta2", tuple(float(v) for v in np.ravel(self.theta2)))
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def theta1(self):
        return np.array((self.xi,) + self.nu)

    @property
    def sigma(self):
        return float(np.sqrt(self.sigma2))

    def validate(self, spec):
        spec.check_roots(self.nu)
        return self


def split_memory(xi):
    """Return ``(m0, zeta0)`` with ``xi = m0 + zeta0`` and ``|zeta0| < 1/2``."""
    m0 = max(0, int(np.floor(xi + 0.5)))
    return m0, xi - m0


def _short_memory_parts(theta1, spec, n):
    theta1 = np.asarray(theta1, dtype=float).ravel()
    nu = theta1[1:]
    ar_poly = spec.ar_poly(nu)
    # None marks a pure AR model, saving a full-length convolution
    inv_ma = series_inverse(spec.ma_poly(nu), n) if spec.p12 else None
    return float(theta1[0]), ar_poly, inv_ma


def _over_ma(c, inv_ma, n):
    return convolve(c, inv_ma, n) if inv_ma is not None else convolve(c, [1.0], n)


def ar_coeffs(theta1, spec, n):
    """Coefficients ``alpha_j`` of ``(1 - s)^xi AR(s) / MA(s)``; ``alpha_0 = 1``."""
    xi, ar_poly, inv_ma = _short_memory_parts(theta1, spec, n)
    diff = delta_coeffs(-xi, n)
    return _over_ma(convolve(diff, ar_poly, n), inv_ma, n)


def ar_deriv_coeffs(theta1, spec, n):
    """Parameter derivatives of the AR-representation coefficients.

    Returns
    -------
    ndarray of shape (p1, n)
        Row 0 is the derivative in ``xi``; then one row per AR coefficient and
        one per MA coefficient.
    """
    xi, ar_poly, inv_ma = _short_memory_parts(theta1, spec, n)
    diff = delta_coeffs(-xi, n)
    alpha = _over_ma(convolve(diff, ar_poly, n), inv_ma, n)
    rows = np.zeros((spec.p1, n))
    rows[0] = -convolve(alpha, log_coeffs(n), n)
    if spec.p11:
        # d/da_k: -s^k (1-s)^xi / MA(s)
        base = _over_ma(diff, inv_ma, n)
        for k in range(1, spec.p11 + 1):
            rows[k, k:] = -base[:n - k]
    if spec.p12:
        # d/db_k: -s^k alpha(s) / MA(s)
        base = _over_ma(alpha, inv_ma, n)
        for k in range(1, spec.p12 + 1):
            rows[spec.p11 + k, k:] = -base[:n - k]
    return rows


def simulate(theta, spec, n, eps, burn_in=5000):
    """Simulate the type-II fractional process ``x_1, ..., x_n``.

    The stationary input ``u_t = sigma MA(B)/AR(B) eps_t`` is generated over
    ``burn_in + n`` periods from zero initial conditions.  It is fractionally
    integrated to order ``zeta0`` with a filter truncated at the start of the
    burn-in, set to zero before ``t = 1``, and then cumulated ``m0`` times.

    Parameters
    ----------
    theta : ThetaFull
        True parameters; ``theta2`` is ignored (trend terms are added by the caller).
    spec : ModelSpec
    n : int
    eps : array_like
        Unit-variance innovations, at least ``n + burn_in`` long. The last ``n``
        used values drive periods ``1..n``.
    burn_in : int
    """
    n = int(n)
    burn_in = int(burn_in)
    if n < 1 or burn_in < 0:
        raise ValueError("need n >= 1 and burn_in >= 0")
    eps = np.asarray(eps, dtype=float)
    total = n + burn_in
    if eps.size < total:
        raise ValueError(f"innovation series too short: need {total}, got {eps.size}")
    eps = eps[:total]
    nu = np.asarray(theta.nu, dtype=float)
    u = theta.sigma * lfilter(spec.ma_poly(nu), spec.ar_poly(nu), eps)
    m0, zeta0 = split_memory(theta.xi)
    if zeta0 != 0.0:
        x = _filter_tail(delta_coeffs(zeta0, total), u, n)
    else:
        x = u[burn_in:].copy()
    for _ in range(m0):
        x = np.cumsum(x)
    return x


def _filter_tail(c, u, n):
    """Last ``n`` outputs of ``apply_filter(c, u)`` without computing the burn-in part."""
    total = u.size
    if 4 * n >= total:
        return apply_filter(c, u)[total - n:]
    rev = u[::-1]
    out = np.empty(n)
    for k in range(n):
        lag = n - 1 - k
        out[k] = np.dot(c[:total - lag], rev[lag:])
    return out


def acf_farima0d0(d, sigma2, k):
    """Autocovariance at lag ``k`` of a stationary FARIMA(0, d, 0)."""
    d = float(d)
    if abs(d) >= 0.5:
        raise ValueError("closed-form autocovariance requires |d| < 1/2")
    k = abs(int(k))
    g = sigma2 * gamma(1.0 - 2.0 * d) / gamma(1.0 - d) ** 2
    for j in range(1, k + 1):
        g *= (j - 1.0 + d) / (j - d)
    return g
