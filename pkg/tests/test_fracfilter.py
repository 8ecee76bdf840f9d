import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammaln, poch

from fracadapt.errors import NonInvertibleSeriesError
from fracadapt.fracfilter import (
    apply_filter, convolve, delta_coeffs, filter_matrix, log_coeffs, series_inverse)


def gamma_ratio(d, n):
    # Gamma(j + d) / (Gamma(d) Gamma(j + 1)) via the Pochhammer symbol (d)_j / j!
    j = np.arange(n)
    return poch(d, j) / np.exp(gammaln(j + 1.0))


@pytest.mark.parametrize("d, expected", [
    (0.0, [1, 0, 0, 0]),
    (-1.0, [1, -1, 0, 0]),
    (1.0, [1, 1, 1, 1]),
    (0.5, [1, 0.5, 0.375, 0.3125]),
])
def test_delta_coeffs_small_cases(d, expected):
    np.testing.assert_allclose(delta_coeffs(d, 4), expected, rtol=0, atol=1e-15)


def test_nonpositive_integer_orders_give_exact_zeros():
    for m in range(4):
        c = delta_coeffs(-m, 20)
        assert np.all(c[m + 1:] == 0.0)


@pytest.mark.parametrize("d", [-1.9, -1.3, -0.4, 0.25, 0.5, 0.75, 1.25, 1.99])
def test_delta_coeffs_match_gamma_ratio(d):
    np.testing.assert_allclose(delta_coeffs(d, 51), gamma_ratio(d, 51), rtol=1e-12)


@pytest.mark.parametrize("d", [-0.4, 0.25, 0.75])
def test_stirling_decay(d):
    c = delta_coeffs(d, 10001)
    j = np.arange(10, 10001)
    dev = np.log(np.abs(c[j])) - (d - 1.0) * np.log(j)
    # converges to -log|Gamma(d)|; bounded band
    assert np.ptp(dev) < 0.1


def test_delta_coeffs_rejects_zero_length():
    with pytest.raises(ValueError):
        delta_coeffs(0.3, 0)


def test_log_coeffs():
    np.testing.assert_allclose(log_coeffs(4), [0, 1, 0.5, 1 / 3])
    np.testing.assert_array_equal(log_coeffs(1), [0.0])
    np.testing.assert_allclose(convolve(log_coeffs(4), delta_coeffs(1, 4), 4), [0, 1, 1.5, 11 / 6])
    with pytest.raises(ValueError):
        log_coeffs(0)


def test_convolve_examples():
    np.testing.assert_array_equal(convolve([1, 1], [1, -1], 3), [1, 0, -1])
    np.testing.assert_array_equal(convolve([1, 2], [3, 4], 3), [3, 10, 8])
    d = 0.37
    impulse = np.zeros(30)
    impulse[0] = 1
    np.testing.assert_allclose(convolve(delta_coeffs(d, 30), delta_coeffs(-d, 30), 30), impulse, atol=1e-15)
    with pytest.raises(ValueError):
        convolve([1.0], [1.0], 0)
    with pytest.raises(ValueError):
        convolve([], [1.0], 3)


def test_series_inverse():
    np.testing.assert_allclose(series_inverse([1, -0.5], 4), [1, 0.5, 0.25, 0.125])
    np.testing.assert_array_equal(series_inverse([1.0], 3), [1, 0, 0])
    with pytest.raises(NonInvertibleSeriesError):
        series_inverse([0.0, 1.0], 3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-0.6, 0.6), min_size=0, max_size=4), st.integers(1, 40))
def test_series_inverse_is_an_involution(tail, n):
    a = np.array([1.0] + tail)
    b = series_inverse(a, n)
    impulse = np.zeros(n)
    impulse[0] = 1.0
    np.testing.assert_allclose(convolve(a, b, n), impulse, atol=1e-10)
    restored = np.concatenate([a, np.zeros(n)])[:n]
    np.testing.assert_allclose(series_inverse(b, n), restored, atol=1e-9)


def test_apply_filter_examples():
    x = np.array([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(apply_filter([1, -1, 0], x), [1, 1, 1])
    np.testing.assert_array_equal(apply_filter([1, 0, 0], x), x)
    np.testing.assert_array_equal(apply_filter(delta_coeffs(1, 3), x), [1, 3, 6])
    with pytest.raises(ValueError):
        apply_filter([1.0], np.zeros(0))


def test_apply_filter_matches_direct_summation():
    rng = np.random.default_rng(3)
    c, x = rng.standard_normal(50), rng.standard_normal(50)
    direct = np.array([sum(c[j] * x[t - j] for j in range(t + 1)) for t in range(50)])
    np.testing.assert_allclose(apply_filter(c, x), direct, atol=1e-12)
    X = rng.standard_normal((50, 3))
    np.testing.assert_allclose(apply_filter(c, X), filter_matrix(c, 50) @ X, atol=1e-12)
    np.testing.assert_allclose(apply_filter(c, X)[:, 1], apply_filter(c, X[:, 1]), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.floats(-3, 3), st.floats(-3, 3))
def test_apply_filter_is_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    c, x, y = rng.standard_normal(20), rng.standard_normal(20), rng.standard_normal(20)
    np.testing.assert_allclose(apply_filter(c, a * x + b * y),
                               a * apply_filter(c, x) + b * apply_filter(c, y), atol=1e-12)
