import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracadapt.errors import SingularBasisError
from fracadapt.innovations import KINDS, sample, stream, true_info
from fracadapt.score import BasisConfig, ScoreFit, eval_score, fit_score, j_path


def test_hand_example():
    h = np.array([-1.0, 0.0, 1.0])
    fit = fit_score(h, BasisConfig("id", 1))
    assert abs(fit.W[0, 0] - 2 / 3) < 1e-12
    assert abs(fit.w[0] - 1.0) < 1e-12
    assert abs(fit.a_hat[0] - 1.5) < 1e-12
    assert abs(fit.J_L - 1.5) < 1e-12
    np.testing.assert_allclose(eval_score(fit, h), [-1.5, 0.0, 1.5], atol=1e-12)


def test_basis_config():
    assert BasisConfig("s").phi_kind == "identity"
    with pytest.raises(ValueError):
        BasisConfig("cubic")
    with pytest.raises(ValueError):
        BasisConfig("id", 0)
    b = BasisConfig("bounded", 3)
    s = np.array([-1.3, 0.2, 2.0])
    h = 1e-6
    np.testing.assert_allclose(b.dphi(s), (b.phi(s + h) - b.phi(s - h)) / (2 * h), rtol=1e-8)
    phi, dphi = b.basis(s)
    fd = (b.basis(s + h)[0] - b.basis(s - h)[0]) / (2 * h)
    np.testing.assert_allclose(dphi, fd, rtol=1e-7)


def test_constant_input_is_singular():
    with pytest.raises(SingularBasisError) as info:
        fit_score(np.full(20, 0.7), BasisConfig("id", 2))
    assert info.value.L == 2
    with pytest.raises(ValueError):
        fit_score(np.arange(3.0), BasisConfig("id", 2))


def test_zero_coefficients_give_zero_score():
    h = stream(1, 0).standard_normal(50)
    fit = fit_score(h, BasisConfig("id", 2))
    zero = ScoreFit(np.zeros(2), fit.W, fit.w, 0.0, fit.basis, fit.rcond)
    np.testing.assert_array_equal(eval_score(zero, h), 0.0)


def test_gaussian_limits():
    h = stream(2, 0).standard_normal(10**5)
    fit = fit_score(h, BasisConfig("id", 1))
    assert abs(fit.a_hat[0] - 1) < 0.05 and abs(fit.J_L - 1) < 0.05
    assert np.mean((eval_score(fit, h) - h) ** 2) <= 0.01


def test_coefficients_solve_the_normal_equations():
    h = sample("t5", 2000, stream(3, 0))
    fit = fit_score(h, BasisConfig("bounded", 3))
    p = h / np.sqrt(1 + h * h)
    P = np.column_stack([p, p**2, p**3])
    P -= P.mean(axis=0)
    dp = (1 + h * h) ** -1.5
    w = np.array([np.mean(dp), np.mean(2 * p * dp), np.mean(3 * p**2 * dp)])
    np.testing.assert_allclose(fit.a_hat, np.linalg.solve(P.T @ P / h.size, w), rtol=1e-9)
    assert fit.J_L == pytest.approx(fit.a_hat @ fit.W @ fit.a_hat, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(KINDS), st.sampled_from(["identity", "bounded"]))
def test_j_monotone_and_centered(seed, kind, phi):
    h = sample(kind, 300, stream(seed, 1))
    J = j_path(h, phi, 4)
    assert np.all(np.diff(J) >= -1e-10 * J[-1])
    fit = fit_score(h, BasisConfig(phi, len(J)))
    assert abs(eval_score(fit, h).sum()) < 1e-10 * h.size


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("phi", ["identity", "bounded"])
def test_j_below_information_bound(kind, phi):
    h = sample(kind, 10**5, stream(4, KINDS.index(kind)))
    J = j_path(h, phi, 4)
    assert J.size == 4
    assert np.all(J <= 1.05 * true_info(kind))


def test_condition_number_degrades_with_L():
    h = stream(5, 0).standard_normal(5000)
    rc = [fit_score(h, BasisConfig("bounded", L)).rcond for L in range(1, 5)]
    assert rc[0] == 1.0 and rc[-1] < rc[1]
