"""One-step efficient estimators, covariance estimates and Wald tests.

Starting from a root-n consistent estimate, a single Newton-type step is
taken on the M-estimation objective ``sum_t -log g(E_t(theta) / sigma)``
with the score ``-g'/g`` replaced either by its series estimate (adaptive
estimator) or by a parametric family fitted to the standardized residuals.
The Hessian is replaced by its expectation ``J R / sigma^2``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.optimize import minimize, minimize_scalar
from scipy.special import gammaln

from .fracfilter import log_coeffs, series_inverse
from .errors import DesignDegenerateError, EstimationFailed, InvalidFamilyError, InvalidRestrictionError
from .initial import InitialFit, initial_fit
from .model import ModelSpec
from .residuals import EXPONENT_TOL, classify, full_design, residual_bundle
from .score import BasisConfig, eval_score, fit_score

_RCOND_R = 1e-12


@dataclass
class EstimationResult:
    theta1_hat: np.ndarray
    theta2_hat: np.ndarray
    cov1: np.ndarray
    cov2: np.ndarray
    J_used: float
    L_used: int
    method: str
    init: InitialFit
    n: int
    dn: np.ndarray
    score_fit: object = field(default=None, repr=False)
    theta3_hat: np.ndarray = None
    cov3: np.ndarray = None
    family: str = None

    @property
    def xi_hat(self):
        return float(self.theta1_hat[0])

    @property
    def se1(self):
        return np.sqrt(np.diag(self.cov1))

    @property
    def se2(self):
        return np.sqrt(np.diag(self.cov2))


def dn_matrix(chi, xi, n):
    """Diagonal of the trend normalization ``D_n``.

    Entry ``j`` is ``n^(chi_j - xi + 1/2)``, or ``sqrt(log n)`` for a first
    exponent on the boundary ``chi_1 = xi - 1/2``.
    """
    chi = np.asarray(chi, dtype=float).ravel()
    if chi.size == 0:
        return np.zeros(0)
    if chi[0] < xi - 0.5 - EXPONENT_TOL:
        raise ValueError(f"trend exponent {chi[0]} lies below xi - 1/2 = {xi - 0.5}")
    d = float(n) ** (chi - xi + 0.5)
    if abs(chi[0] - xi + 0.5) <= EXPONENT_TOL:
        d[0] = np.sqrt(np.log(n))
    return d


def omega1(spec, nu=(), n_terms=1 << 15):
    """Limiting information matrix for ``(xi, nu)`` per unit innovation variance.

    Computed as ``sum_j gamma_j gamma_j^T`` over the power-series coefficients
    of ``(log(1 - s), d log alpha / d nu)``; the ``(xi, xi)`` entry is exactly
    ``pi^2 / 6``.
    """
    nu = np.asarray(nu, dtype=float)
    n = int(n_terms)
    rows = np.zeros((spec.p1, n))
    rows[0] = -log_coeffs(n)
    if spec.p11:
        inv = series_inverse(spec.ar_poly(nu), n)
        for k in range(1, spec.p11 + 1):
            rows[k, k:] = -inv[:n - k]
    if spec.p12:
        inv = series_inverse(spec.ma_poly(nu), n)
        for k in range(1, spec.p12 + 1):
            rows[spec.p11 + k, k:] = -inv[:n - k]
    om = rows @ rows.T
    om[0, 0] = np.pi**2 / 6.0
    return om


def omega2(chi, xi, sigma2=1.0, beta1=1.0):
    """Trend-coefficient matrix in the closed form with Cauchy-matrix core."""
    a = np.asarray(chi, dtype=float).ravel() - xi
    num = np.sqrt(np.clip(2.0 * a + 1.0, 0.0, None))
    m = (np.outer(num, num) * np.outer(a, a)
         / ((a[:, None] + a[None, :] + 1.0) * np.outer(a + 1.0, a + 1.0)))
    if a.size and abs(a[0] + 0.5) <= EXPONENT_TOL:
        m[0, :] = 0.0
        m[:, 0] = 0.0
        m[0, 0] = 1.0
    return sigma2 / (2.0 * np.pi) * beta1**2 * m


def trend_info_limit(chi, xi, beta1=1.0):
    """Limit of ``D_n^{-1} R_2 D_n^{-1}`` for trend exponents above ``xi - 1/2``.

    Uses ``(1 - B)^xi t^chi ~ Gamma(chi + 1) / Gamma(chi - xi + 1) t^(chi - xi)``
    and the long-run gain ``1 / beta(1)`` of the short-memory filter.
    """
    chi = np.asarray(chi, dtype=float).ravel()
    a = chi - xi
    if np.any(a <= -0.5 + EXPONENT_TOL):
        raise ValueError("closed-form limit requires chi_j - xi > -1/2")
    c = np.exp(gammaln(chi + 1.0) - gammaln(a + 1.0)) / beta1
    core = np.outer(a, a) / ((a[:, None] + a[None, :] + 1.0) * np.outer(a + 1.0, a + 1.0))
    return np.outer(c, c) * core


def _newton_block(R, r, J, sigma, label):
    if R.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0))
    eig = np.linalg.eigvalsh(R)
    if not (eig[-1] > 0 and eig[0] / eig[-1] > _RCOND_R):
        raise DesignDegenerateError(f"derivative cross-product matrix for {label} is singular")
    Rinv = np.linalg.inv(R)
    Rinv = 0.5 * (Rinv + Rinv.T)
    return -sigma * Rinv @ r / J, sigma**2 * Rinv / J


def _prepare(y, design, spec, init):
    y = np.asarray(y, dtype=float).ravel()
    spec = spec or ModelSpec()
    theta1 = np.asarray(init.theta1_tilde, dtype=float)
    theta2 = np.asarray(init.theta2_tilde, dtype=float)
    E, E1, E2 = residual_bundle(theta1, theta2, y, design, spec)
    return y, spec, theta1, theta2, E, E1, E2


def _assemble(psi, J, E1, E2, theta1, theta2, sigma, init, design, n, **extra):
    r1, r2 = E1.T @ psi, E2.T @ psi
    R1, R2 = E1.T @ E1, E2.T @ E2
    step1, cov1 = _newton_block(R1, r1, J, sigma, "theta1")
    step2, cov2 = _newton_block(R2, r2, J, sigma, "theta2")
    chi = design.chi if design is not None else ()
    return EstimationResult(
        theta1_hat=theta1 + step1, theta2_hat=theta2 + step2, cov1=cov1, cov2=cov2,
        J_used=float(J), init=init, n=n, dn=dn_matrix(chi, theta1[0], n), **extra)


def one_step_adaptive(y, design, spec, init, basis=None):
    """Adaptive one-step estimator with a series-estimated score.

    Parameters
    ----------
    y : array_like
        Observations.
    design : RegressionDesign or None
        Trend design; its ``chi`` must match ``init.theta2_tilde``.
    spec : ModelSpec
    init : InitialFit
    basis : BasisConfig, default identity with L = 1

    Returns
    -------
    EstimationResult
        ``cov1`` and ``cov2`` are variance estimates of ``theta1_hat`` and
        ``theta2_hat`` themselves (no further normalization needed).
    """
    basis = basis or BasisConfig()
    y, spec, theta1, theta2, E, E1, E2 = _prepare(y, design, spec, init)
    n = y.size
    if n < basis.L + E1.shape[1] + E2.shape[1] + 2:
        raise ValueError("sample too short for the requested basis and parameter count")
    sigma = init.sigma_tilde
    h = E / sigma
    fit = fit_score(h, basis)
    psi = eval_score(fit, h)
    J = float(np.mean(psi * psi))
    if not J > 0:
        raise EstimationFailed("estimated information is zero")
    return _assemble(psi, J, E1, E2, theta1, theta2, sigma, init, design, n,
                     L_used=basis.L, method="adaptive", score_fit=fit)


@dataclass(frozen=True)
class ParametricFamily:
    """Parametric innovation density ``g(s; theta3)``.

    ``score`` is ``-d log g / ds``; ``dlogpdf`` the gradient of ``log g`` in
    ``theta3`` with shape (n, p3).  ``bounds`` delimit the compact search set.
    """

    name: str
    logpdf: object
    score: object
    dlogpdf: object
    start: tuple = ()
    bounds: tuple = ()

    @property
    def p3(self):
        return len(self.start)


def _gauss_logpdf(s, th):
    return -0.5 * s * s - 0.5 * np.log(2.0 * np.pi)


def _laplace_logpdf(s, th):
    b = th[0]
    return -np.log(2.0 * b) - np.abs(s) / b


def _t_logpdf(s, th):
    nu = th[0]
    return (gammaln((nu + 1) / 2) - gammaln(nu / 2) - 0.5 * np.log((nu - 2) * np.pi)
            - (nu + 1) / 2 * np.log1p(s * s / (nu - 2)))


def _numeric_dlogpdf(logpdf):
    def grad(s, th):
        th = np.asarray(th, dtype=float)
        out = np.empty((np.size(s), th.size))
        for k in range(th.size):
            step = 1e-5 * max(1.0, abs(th[k]))
            up, dn = th.copy(), th.copy()
            up[k] += step
            dn[k] -= step
            out[:, k] = (logpdf(s, up) - logpdf(s, dn)) / (2 * step)
        return out
    return grad


FAMILIES = {
    "gaussian": ParametricFamily(
        "gaussian", _gauss_logpdf, lambda s, th: s, lambda s, th: np.zeros((np.size(s), 0))),
    "laplace": ParametricFamily(
        "laplace", _laplace_logpdf, lambda s, th: np.sign(s) / th[0],
        lambda s, th: (-1.0 / th[0] + np.abs(s) / th[0] ** 2)[:, None],
        start=(1.0 / np.sqrt(2.0),), bounds=((0.05, 5.0),)),
    "t": ParametricFamily(
        "t", _t_logpdf, lambda s, th: (th[0] + 1) * s / (th[0] - 2 + s * s),
        _numeric_dlogpdf(_t_logpdf), start=(8.0,), bounds=((2.05, 200.0),)),
}


def _fit_theta3(family, h):
    if family.p3 == 0:
        return np.zeros(0)

    def nll(th):
        v = family.logpdf(h, np.atleast_1d(th))
        if not np.all(np.isfinite(v)):
            raise InvalidFamilyError(f"{family.name} log-density is not finite")
        return -float(np.mean(v))

    if family.p3 == 1:
        lo, hi = family.bounds[0]
        res = minimize_scalar(nll, bounds=(lo, hi), method="bounded", options={"xatol": 1e-8})
        x = np.array([res.x])
    else:
        res = minimize(nll, np.asarray(family.start, dtype=float), method="Nelder-Mead",
                       bounds=family.bounds)
        x = np.asarray(res.x)
    if not res.success:
        raise EstimationFailed(f"fitting {family.name} parameters failed: {res.message}")
    return x


def one_step_parametric(y, design, spec, init, family="gaussian"):
    """One-step estimator using a fitted parametric innovation density.

    ``theta3`` is estimated by maximizing the mean log-density of the
    standardized initial residuals; its variance estimate is the inverse
    outer product of the ``theta3`` scores divided by ``n``.
    """
    if isinstance(family, str):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
        family = FAMILIES[family]
    y, spec, theta1, theta2, E, E1, E2 = _prepare(y, design, spec, init)
    n = y.size
    sigma = init.sigma_tilde
    h = E / sigma
    theta3 = _fit_theta3(family, h)
    psi = np.asarray(family.score(h, theta3), dtype=float)
    if not np.all(np.isfinite(psi)):
        raise InvalidFamilyError(f"{family.name} score is not finite")
    J = float(np.mean(psi * psi))
    if not J > 0:
        raise EstimationFailed("estimated information is zero")
    cov3 = np.zeros((0, 0))
    if family.p3:
        g = family.dlogpdf(h, theta3)
        cov3 = np.linalg.inv(g.T @ g / n) / n
    return _assemble(psi, J, E1, E2, theta1, theta2, sigma, init, design, n,
                     L_used=0, method="parametric", theta3_hat=theta3, cov3=cov3,
                     family=family.name)


@dataclass(frozen=True)
class WaldResult:
    statistic: float
    df: int
    p_value: float
    one_sided: bool = False


def wald_test(result, R, r=None, block="theta1", one_sided=False):
    """Wald test of ``R theta = r`` on one parameter block.

    With ``one_sided=True`` and a single restriction the signed root
    ``(R theta - r) / se`` is referred to the standard normal against the
    alternative ``R theta > r``.
    """
    if block == "theta1":
        est, cov = result.theta1_hat, result.cov1
    elif block == "theta2":
        est, cov = result.theta2_hat, result.cov2
    else:
        raise ValueError("block must be 'theta1' or 'theta2'")
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.shape[1] != est.size or R.shape[0] > est.size or R.shape[0] == 0:
        raise InvalidRestrictionError(f"restriction matrix shape {R.shape} does not fit {est.size} parameters")
    r = np.zeros(R.shape[0]) if r is None else np.atleast_1d(np.asarray(r, dtype=float))
    diff = R @ est - r
    V = R @ cov @ R.T
    eig = np.linalg.eigvalsh(V)
    if not (eig[0] > 0 and eig[0] / eig[-1] > 1e-14):
        raise InvalidRestrictionError("restricted covariance is singular")
    if one_sided:
        if R.shape[0] != 1:
            raise InvalidRestrictionError("one-sided tests take a single restriction")
        z = float(diff[0] / np.sqrt(V[0, 0]))
        return WaldResult(z, 1, float(stats.norm.sf(z)), True)
    W = float(diff @ np.linalg.solve(V, diff))
    return WaldResult(W, R.shape[0], float(stats.chi2.sf(W, R.shape[0])), False)


def reclassify(init, exponents, n):
    """Drop trend columns that the initial memory estimate classifies as negligible.

    The initial fit is computed with every exponent treated as an estimated
    trend; once ``xi`` is estimated, only exponents in the estimable set keep
    their coefficients.
    """
    full = full_design(exponents)
    design = classify(exponents, init.xi)
    keep = [full.T3.index(j) for j in design.T3]
    theta2 = np.asarray(init.theta2_tilde, dtype=float)[keep]
    new = InitialFit(init.theta1_tilde, theta2, init.sigma2_tilde, init.objective_value,
                     init.method, init.hit_boundary, design, init.grid, init.profile)
    return new, design


def estimate(y, spec=None, exponents=(), initial="css", basis=None, family=None,
             **initial_kwargs):
    """Initial fit followed by the adaptive (or, with ``family``, parametric) one-step update.

    The CSS start is the default: being close to efficient, it keeps the
    second-order remainder of the single step small, which matters for the
    coverage of Wald tests at moderate ``n``.  ``initial="whittle"`` selects
    the tapered Whittle start used by the Monte Carlo harness.
    """
    spec = spec or ModelSpec(regression_exponents=tuple(exponents))
    exponents = tuple(exponents) or spec.regression_exponents
    y = np.asarray(y, dtype=float)
    full = full_design(exponents) if exponents else None
    init = initial_fit(y, initial, full, spec, **initial_kwargs)
    design = None
    if exponents:
        init, design = reclassify(init, exponents, y.size)
    if family is not None:
        return one_step_parametric(y, design, spec, init, family)
    return one_step_adaptive(y, design, spec, init, basis)
