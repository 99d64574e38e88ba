import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import eval_gegenbauer, eval_legendre, roots_legendre

from spherframe.gegenbauer import (KernelSeries, dim_harmonics, dim_polynomials, eval_kernel_series, eval_Pk,
                                   eval_Pk_deriv, reproducing_kernel)


def test_degree_zero_is_one():
    assert eval_Pk(3, 0, 0.7) == 1.0


def test_value_at_one_is_dimension():
    assert eval_Pk(3, 5, 1.0) == pytest.approx(11.0, abs=1e-13)


def test_legendre_oracle_degree_two():
    # P_2 = 5 L_2 on S^2
    assert eval_Pk(3, 2, 0.0) == pytest.approx(-2.5, abs=1e-14)
    assert eval_Pk(3, 2, 0.0) == pytest.approx(5 * eval_legendre(2, 0.0), abs=1e-14)


def test_constant_series():
    assert eval_kernel_series(KernelSeries(3, np.array([1.0])), 0.37) == pytest.approx(1.0)


def test_linear_series():
    assert eval_kernel_series(KernelSeries(3, np.array([0.0, 1.0])), 0.3) == pytest.approx(0.9, abs=1e-15)


@pytest.mark.parametrize("L", [0, 1, 5, 40])
def test_all_ones_series_at_one(L):
    assert eval_kernel_series(reproducing_kernel(3, L), 1.0) == pytest.approx((L + 1) ** 2, rel=1e-13)


def test_derivatives():
    assert eval_Pk_deriv(3, 0, 0.2, 1) == 0.0
    assert eval_Pk_deriv(3, 1, 0.5, 1) == pytest.approx(3.0, abs=1e-14)
    assert eval_Pk_deriv(3, 2, 0.5, 0) == eval_Pk(3, 2, 0.5)
    with pytest.raises(NotImplementedError):
        eval_Pk_deriv(3, 2, 0.5, 2)


@pytest.mark.parametrize("d", [3, 4, 5, 7])
@pytest.mark.parametrize("k", [0, 1, 2, 7, 30])
def test_scipy_gegenbauer_oracle(d, k):
    lam = (d - 2) / 2
    t = np.linspace(-1, 1, 41)
    want = (2 * k + d - 2) / (d - 2) * eval_gegenbauer(k, lam, t)
    np.testing.assert_allclose(eval_Pk(d, k, t), want, rtol=1e-11, atol=1e-11 * dim_harmonics(d, k))


@pytest.mark.parametrize("d", [3, 5])
@pytest.mark.parametrize("k", [1, 3, 12])
def test_derivative_against_finite_difference(d, k):
    t, h = np.linspace(-0.9, 0.9, 13), 1e-6
    fd = (eval_Pk(d, k, t + h) - eval_Pk(d, k, t - h)) / (2 * h)
    np.testing.assert_allclose(eval_Pk_deriv(d, k, t), fd, rtol=1e-6, atol=1e-6 * dim_harmonics(d, k) * k * k)


def test_dimension_counts():
    assert [dim_harmonics(3, k) for k in range(5)] == [1, 3, 5, 7, 9]
    assert dim_harmonics(4, 3) == 16
    assert dim_polynomials(3, 4) == 25
    assert dim_polynomials(4, 3) == sum(dim_harmonics(4, k) for k in range(4))


def test_orthogonality_gauss():
    t, w = roots_legendre(129)
    w = w / 2
    P = np.array([eval_Pk(3, k, t) for k in range(33)])
    G = (P * w) @ P.T
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) < 1e-10
    # the reproducing property gives int P_k^2 = P_k(1)
    np.testing.assert_allclose(np.diag(G), [2 * k + 1 for k in range(33)], rtol=1e-12)


def test_orthogonality_weighted_d5():
    # on S^4 the weight is (1 - t^2)^{(d-3)/2} = 1 - t^2
    t, w = roots_legendre(129)
    w = w * (1 - t ** 2)
    w /= w.sum()
    P = np.array([eval_Pk(5, k, t) for k in range(17)])
    G = (P * w) @ P.T
    np.testing.assert_allclose(G, np.diag([dim_harmonics(5, k) for k in range(17)]), atol=1e-9)


@given(st.integers(0, 64), st.lists(st.floats(-1, 1), min_size=1, max_size=20), st.integers(3, 6))
def test_clenshaw_matches_naive(L, ts, d):
    c = np.cos(np.arange(L + 1) * 1.3)
    t = np.array(ts)
    naive = sum(c[k] * eval_Pk(d, k, t) for k in range(L + 1))
    got = eval_kernel_series(KernelSeries(d, c), t)
    scale = np.sum(np.abs(c) * [dim_harmonics(d, k) for k in range(L + 1)])
    np.testing.assert_allclose(got, naive, atol=1e-12 * scale)


@pytest.mark.parametrize("k", [1, 2, 5, 17, 64])
def test_max_at_one(k):
    t = np.linspace(-1, 1, 10_000)
    assert np.max(np.abs(eval_Pk(3, k, t))) <= eval_Pk(3, k, 1.0) * (1 + 1e-13)


def test_domain_errors():
    with pytest.raises(ValueError):
        eval_Pk(3, 2, 1.1)
    with pytest.raises(ValueError):
        eval_Pk(2, 2, 0.1)
    with pytest.raises(ValueError):
        eval_Pk(3, -1, 0.1)
