import numpy as np
import pytest

from fracadapt.innovations import stream
from fracadapt.model import ModelSpec, ThetaFull, ar_coeffs, simulate
from fracadapt.residuals import (
    classify, full_design, regressors, residual_bundle, residual_derivs, residuals, trend_matrix)


def fd_check(theta1, theta2, y, design, spec, h=1e-6):
    """Max of |analytic - central difference| / (1 + |E_t|) over all columns."""
    _, E = residuals(theta1, theta2, y, design, spec)
    E1, E2 = residual_derivs(theta1, theta2, y, design, spec)
    worst = 0.0
    for block, theta, D in ((1, theta1, E1), (2, theta2, E2)):
        for k in range(len(theta)):
            up, dn = np.array(theta, float), np.array(theta, float)
            up[k] += h
            dn[k] -= h
            args_up = (up, theta2) if block == 1 else (theta1, up)
            args_dn = (dn, theta2) if block == 1 else (theta1, dn)
            fd = (residuals(*args_up, y, design, spec)[1] - residuals(*args_dn, y, design, spec)[1]) / (2 * h)
            worst = max(worst, np.max(np.abs(D[:, k] - fd) / (1 + np.abs(E))))
    return worst


def test_trend_matrix_and_classification():
    np.testing.assert_array_equal(trend_matrix((1.0,), 3)[:, 0], [1, 2, 3])
    z, design, z2 = regressors((-1.0, 0.25, 1.0), 0.25, 5)
    assert (design.T1, design.T2, design.T3) == ((0,), (1,), (2,))
    assert design.chi == (1.0,) and z.shape == (5, 3)
    np.testing.assert_array_equal(z2[:, 0], np.arange(1, 6))
    assert classify((-0.25,), 0.25).T3 == (0,)
    assert classify((0.25 + 1e-12,), 0.25).T2 == (0,)
    with pytest.raises(ValueError):
        classify((1.0, 0.0), 0.25)


def test_full_design_keeps_every_exponent():
    d = full_design((-1.0, 0.0, 2.0))
    assert d.T3 == (0, 1, 2) and d.T1 == () and d.p2 == 3


def test_residual_examples():
    spec = ModelSpec()
    e, E = residuals([1.0], [], [1.0, 2.0, 3.0], None, spec)
    np.testing.assert_allclose(e, [1, 1, 1])
    np.testing.assert_allclose(E, [0, 0, 0], atol=1e-15)
    y = stream(1, 0).standard_normal(40)
    e, E = residuals([0.0], [], y, None, spec)
    np.testing.assert_array_equal(e, y)
    assert abs(E.mean()) < 1e-15
    eps = stream(2, 0).standard_normal(40)
    y = 2.0 * np.arange(1, 41) + eps
    design = classify((1.0,), 0.0)
    e, _ = residuals([0.0], [2.0], y, design, spec)
    np.testing.assert_allclose(e, eps, atol=1e-12)
    with pytest.raises(ValueError):
        residuals([0.0], [1.0, 2.0], y, design, spec)
    with pytest.raises(ValueError):
        residuals([0.0], [], [1.0], None, spec)


def test_trend_derivative_with_identity_filter():
    n = 30
    design = classify((0.5, 1.0), 0.0)
    y = stream(3, 0).standard_normal(n)
    _, E2 = residual_derivs([0.0], [0.1, 0.2], y, design, ModelSpec())
    z = trend_matrix((0.5, 1.0), n)
    np.testing.assert_allclose(E2, -(z - z.mean(axis=0)), atol=1e-12)
    E1, _ = residual_derivs([0.3], [0.1, 0.2], y, design, ModelSpec())
    np.testing.assert_allclose(E1.mean(axis=0), 0.0, atol=1e-13)
    np.testing.assert_allclose(E2.mean(axis=0), 0.0, atol=1e-12)


@pytest.mark.parametrize("spec, theta1", [
    (ModelSpec(), [0.3]),
    (ModelSpec(1, 0), [0.8, 0.4]),
    (ModelSpec(1, 1), [1.2, 0.3, -0.4]),
])
def test_derivatives_match_finite_differences(spec, theta1):
    n = 200
    eps = stream(4, 0).standard_normal(n + 500)
    theta = ThetaFull(theta1[0], theta1[1:])
    y = simulate(theta, spec, n, eps, 500) + 0.5 * np.arange(1, n + 1) ** 1.0
    design = classify((1.0,), theta1[0])
    assert fd_check(np.array(theta1), np.array([0.45]), y, design, spec) <= 1e-4


def test_bundle_agrees_with_separate_calls():
    spec = ModelSpec(0, 1)
    y = np.cumsum(stream(5, 0).standard_normal(120))
    design = classify((0.5, 1.5), 0.9)
    th1, th2 = np.array([0.9, 0.2]), np.array([0.1, -0.02])
    E, E1, E2 = residual_bundle(th1, th2, y, design, spec)
    np.testing.assert_allclose(E, residuals(th1, th2, y, design, spec)[1])
    a, b = residual_derivs(th1, th2, y, design, spec)
    np.testing.assert_allclose(E1, a)
    np.testing.assert_allclose(E2, b)


def test_residuals_recover_innovations_when_filter_is_identity():
    eps = stream(6, 0).standard_normal(100)
    x = simulate(ThetaFull(0.0, sigma2=2.25), ModelSpec(), 100, eps, 0)
    e, _ = residuals([0.0], [], x, None, ModelSpec())
    np.testing.assert_allclose(e, 1.5 * eps, atol=1e-14)


def test_longer_truncation_gives_same_filtering():
    y = stream(7, 0).standard_normal(60)
    alpha_long = ar_coeffs([0.4], ModelSpec(), 500)
    e, _ = residuals([0.4], [], y, None, ModelSpec())
    np.testing.assert_allclose(e, np.convolve(alpha_long, y)[:60], atol=1e-13)


def test_constant_shift_is_annihilated_for_integer_memory():
    # the pre-sample is zero, so only the first xi residuals see the shift
    y = np.cumsum(stream(8, 0).standard_normal(80))
    for m in (1, 2):
        e = residuals([float(m)], [], y, None, ModelSpec())[0]
        e_shift = residuals([float(m)], [], y + 7.5, None, ModelSpec())[0]
        np.testing.assert_allclose(e_shift[m:], e[m:], atol=1e-10)
        np.testing.assert_allclose(e_shift[:m] - e[:m], 7.5 * np.cumsum(ar_coeffs([float(m)], ModelSpec(), m)))
