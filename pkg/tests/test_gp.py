import numpy as np
import pytest
from scipy import integrate
from scipy.optimize import approx_fprime
from scipy.stats import norm

from movant.gp import (_neg_ei_unit, _neg_lml, ei_from_moments, expected_improvement, gp_fit,
                       matern52, maximize_ei)
from movant.rng import rng_for


def test_matern_closed_form():
    X1 = np.array([[0.0, 0.0]])
    X2 = np.array([[0.3, 0.4]])
    ls = np.array([1.0, 2.0])
    r = np.sqrt(0.3 ** 2 + 0.2 ** 2)
    ref = 1.7 * (1 + np.sqrt(5) * r + 5 * r * r / 3) * np.exp(-np.sqrt(5) * r)
    assert matern52(X1, X2, ls, 1.7)[0, 0] == pytest.approx(ref)
    assert matern52(X1, X1, ls, 1.7)[0, 0] == 1.7


def test_sine_regression():
    x = np.linspace(0, 1, 16)[:, None]
    y = np.sin(2 * np.pi * x[:, 0])
    m = gp_fit(x, y)
    xt = np.random.default_rng(0).uniform(0, 1, (50, 1))
    mu, _ = m.predict(xt)
    assert np.sqrt(np.mean((mu - np.sin(2 * np.pi * xt[:, 0])) ** 2)) < 0.05


def test_interpolates_training_data():
    rng = np.random.default_rng(3)
    X = rng.uniform(size=(20, 3))
    y = np.sin(3 * X).sum(axis=1)
    m = gp_fit(X, y)
    mu, _ = m.predict(X)
    noise_sd = np.sqrt(m.noise_var) * m.y_scale
    assert np.all(np.abs(mu - y) <= 3 * noise_sd + 1e-6)


def test_constant_targets():
    X = np.random.default_rng(1).uniform(size=(8, 2))
    m = gp_fit(X, np.full(8, 4.2))
    mu, _ = m.predict(np.random.default_rng(2).uniform(size=(30, 2)))
    assert np.allclose(mu, 4.2, atol=1e-6)
    ei = expected_improvement(m, np.random.default_rng(2).uniform(size=(30, 2)), 4.2)
    assert np.all(ei < 0.05 * m.y_scale)


def test_duplicate_inputs():
    X = np.array([[0.5], [0.5], [0.1], [0.9]])
    m = gp_fit(X, np.array([1.0, 1.2, 0.0, 0.3]))
    assert m.noise_var > 0
    assert np.all(np.isfinite(m.predict(X)[0]))


def test_fit_is_deterministic():
    X = np.random.default_rng(5).uniform(size=(12, 2))
    y = X[:, 0] ** 2 - X[:, 1]
    a, b = gp_fit(X, y, seed=3), gp_fit(X, y, seed=3)
    assert np.array_equal(a.theta, b.theta)


def test_bad_inputs():
    with pytest.raises(ValueError):
        gp_fit([[0.0]], [1.0])
    with pytest.raises(ValueError):
        gp_fit([[0.0], [1.0]], [1.0, np.inf])


def test_likelihood_gradient():
    rng = np.random.default_rng(0)
    X = rng.uniform(size=(15, 3))
    y = np.cos(4 * X[:, 0]) + X[:, 1]
    y = (y - y.mean()) / y.std()
    sq = ((X[:, None] - X[None]) ** 2).transpose(2, 0, 1).reshape(3, -1).copy()
    theta = np.array([np.log(0.4), np.log(0.7), np.log(1.3), 0.2, np.log(1e-3)])
    _, g = _neg_lml(theta, X, y, sq)
    num = approx_fprime(theta, lambda t: _neg_lml(t, X, y, sq)[0], 1e-6)
    assert np.allclose(g, num, rtol=1e-4, atol=1e-4)


def test_ei_examples():
    assert ei_from_moments(1.0, 0.0, 1.0, 0.0) == 0.0
    assert ei_from_moments(2.0, 0.0, 1.0, 0.5) == 0.5
    assert ei_from_moments(0.0, 1.0, 0.0, 0.0) == pytest.approx(norm.pdf(0), abs=1e-15)


def test_ei_matches_quadrature():
    rng = np.random.default_rng(9)
    for _ in range(20):
        mu, sd, inc = rng.normal(), rng.uniform(0.05, 2), rng.normal()
        xi = 0.01
        ref, _ = integrate.quad(lambda f: max(0.0, f - inc - xi) * norm.pdf(f, mu, sd),
                                mu - 12 * sd, mu + 12 * sd, points=[inc + xi], epsabs=1e-12)
        assert ei_from_moments(mu, sd, inc, xi) == pytest.approx(ref, abs=1e-6)


def test_ei_gradient():
    rng = np.random.default_rng(1)
    X = rng.uniform(size=(10, 2))
    m = gp_fit(X, np.sin(5 * X[:, 0]) * X[:, 1])
    u = np.array([0.37, 0.61])
    _, g = _neg_ei_unit(u, m, 0.5, 0.01)
    num = approx_fprime(u, lambda v: _neg_ei_unit(v, m, 0.5, 0.01)[0], 1e-7)
    assert np.allclose(g, num, rtol=1e-3, atol=1e-6)


def test_posterior_variance_non_negative():
    X = np.random.default_rng(2).uniform(size=(30, 2))
    m = gp_fit(X, X.sum(axis=1))
    _, sd = m.predict(np.vstack([X, np.random.default_rng(3).uniform(size=(100, 2))]))
    assert np.all(sd >= 0)


def test_maximize_ei_stays_in_cube():
    X = np.random.default_rng(4).uniform(size=(10, 3))
    m = gp_fit(X, -np.sum((X - 0.3) ** 2, axis=1))
    inc = float(m.y.max())
    for center in (None, m.X[int(np.argmax(m.y))]):
        u = maximize_ei(m, inc, rng_for(0), center=center)
        assert u.shape == (3,) and np.all((u >= 0) & (u <= 1))
