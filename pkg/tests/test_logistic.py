import math

import numpy as np
import pytest

from proxlogit import Dataset, lipschitz_constant, loss_gradient, loss_value, softplus
from proxlogit.logistic import _power_iteration

from conftest import make_dataset


def naive_loss(beta, data):
    # per-sample summation in plain Python, the independent oracle
    total = 0.0
    for i in range(data.n_samples):
        z = float(np.dot(data.features[:, i], beta))
        total += math.log(1.0 + math.exp(z)) - data.labels[i] * z
    return total


def fd_gradient(beta, data, h=1e-5):
    g = np.empty_like(beta)
    for i in range(len(beta)):
        e = np.zeros_like(beta)
        e[i] = h
        g[i] = (loss_value(beta + e, data) - loss_value(beta - e, data)) / (2 * h)
    return g


class TestSoftplus:
    def test_at_zero(self):
        assert softplus(0.0) == pytest.approx(math.log(2), abs=1e-15)

    def test_large_positive_no_overflow(self):
        assert float(softplus(1000.0)) == 1000.0

    def test_large_negative_underflows_to_zero(self):
        v = float(softplus(-1000.0))
        assert v == 0.0

    def test_vectorized(self):
        z = np.array([-2.0, 0.0, 3.0])
        np.testing.assert_allclose(softplus(z), np.log1p(np.exp(z)), rtol=1e-15)


class TestLossValue:
    def test_zero_beta_is_n_log2(self, small_data):
        assert loss_value(np.zeros(small_data.n_features), small_data) == pytest.approx(
            small_data.n_samples * math.log(2), rel=1e-14)

    def test_scalar_instance(self):
        # d=1, n=1, x=[1], y=1, beta=[10]: softplus(10) - 10
        data = Dataset(np.array([[1.0]]), np.array([1.0]))
        assert loss_value(np.array([10.0]), data) == pytest.approx(4.539889921686465e-05, rel=1e-12)

    def test_matches_naive_oracle(self):
        data = make_dataset(seed=21, d=5, n=20)
        rng = np.random.default_rng(2)
        for _ in range(5):
            beta = rng.normal(size=5)
            assert loss_value(beta, data) == pytest.approx(naive_loss(beta, data), rel=1e-12)

    def test_nonnegative(self):
        data = make_dataset(seed=3, d=8, n=30)
        rng = np.random.default_rng(4)
        for _ in range(20):
            assert loss_value(rng.normal(scale=3, size=8), data) >= 0.0

    def test_dimension_mismatch(self, small_data):
        with pytest.raises(ValueError):
            loss_value(np.zeros(small_data.n_features + 1), small_data)

    def test_convex_along_segments(self):
        data = make_dataset(seed=17, d=6, n=25)
        rng = np.random.default_rng(18)
        for _ in range(10):
            a, b = rng.normal(size=6), rng.normal(size=6)
            for theta in (0.25, 0.5, 0.9):
                mid = loss_value(theta * a + (1 - theta) * b, data)
                chord = theta * loss_value(a, data) + (1 - theta) * loss_value(b, data)
                assert mid <= chord + 1e-10


class TestLossGradient:
    def test_zero_beta(self, small_data):
        g = loss_gradient(np.zeros(small_data.n_features), small_data)
        expected = small_data.features @ (0.5 - small_data.labels)
        np.testing.assert_allclose(g, expected, rtol=1e-14)

    def test_scalar_instance(self):
        data = Dataset(np.array([[2.0]]), np.array([0.0]))
        np.testing.assert_allclose(loss_gradient(np.array([0.0]), data), [1.0], rtol=1e-15)

    def test_matches_finite_differences(self):
        data = make_dataset(seed=31, d=7, n=35)
        rng = np.random.default_rng(32)
        beta = rng.normal(size=7)
        g = loss_gradient(beta, data)
        fd = fd_gradient(beta, data)
        np.testing.assert_allclose(g, fd, rtol=1e-6)

    def test_dimension_mismatch(self, small_data):
        with pytest.raises(ValueError):
            loss_gradient(np.zeros(1), small_data)


class TestLipschitzConstant:
    def test_identity(self):
        data = Dataset(np.eye(2), np.array([1.0, 0.0]))
        assert lipschitz_constant(data) == pytest.approx(0.25, rel=1e-9)

    def test_diagonal(self):
        data = Dataset(np.diag([2.0, 1.0]), np.array([1.0, 0.0]))
        assert lipschitz_constant(data) == pytest.approx(1.0, rel=1e-9)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(44)
        X = rng.standard_normal((5, 8))
        data = Dataset(X, rng.integers(0, 2, size=8).astype(float))
        oracle = 0.25 * np.linalg.eigvalsh(X @ X.T)[-1]
        assert lipschitz_constant(data) == pytest.approx(oracle, rel=1e-6)

    def test_zero_matrix_warns_and_returns_zero(self):
        data = Dataset(np.zeros((3, 4)), np.array([1.0, 0.0, 1.0, 0.0]))
        with pytest.warns(UserWarning, match="no positive spectrum"):
            assert lipschitz_constant(data) == 0.0

    def test_gradient_lipschitz_inequality(self):
        # ||grad(a) - grad(b)|| <= L ||a - b|| on random pairs
        data = make_dataset(seed=55, d=10, n=40)
        L = lipschitz_constant(data)
        rng = np.random.default_rng(56)
        for _ in range(50):
            a, b = rng.normal(size=10), rng.normal(size=10)
            lhs = np.linalg.norm(loss_gradient(a, data) - loss_gradient(b, data))
            assert lhs <= L * np.linalg.norm(a - b) * (1 + 1e-10)

    def test_rayleigh_history_monotone_and_bounded(self):
        rng = np.random.default_rng(60)
        X = rng.standard_normal((6, 9))
        _, history = _power_iteration(X, tol=1e-12, max_iters=500)
        hist = np.asarray(history)
        assert np.all(np.diff(hist) >= -1e-9 * hist[-1])
        top = np.linalg.eigvalsh(X @ X.T)[-1]
        assert hist[-1] <= top * (1 + 1e-8)

    def test_parameter_validation(self, small_data):
        with pytest.raises(ValueError):
            lipschitz_constant(small_data, tol=0.0)
        with pytest.raises(ValueError):
            lipschitz_constant(small_data, max_iters=0)
