import numpy as np
import pytest

from distclust.distributions import (
    LOGNORMAL,
    build_dataset,
    cross_cov_between,
    estimate_cross_cov,
    estimate_gaussian,
    estimate_lognormal,
    log_returns,
    lognormal_moments,
)
from distclust.exceptions import NonPositivePrice, NotPSD, ShapeMismatch, TooFewSamples


def test_gaussian_estimates_match_numpy(rng):
    w = rng.normal(size=(30, 3))
    m = estimate_gaussian(w)
    np.testing.assert_allclose(m.mean, w.mean(axis=0))
    np.testing.assert_allclose(m.cov, np.cov(w, rowvar=False))
    assert m.sample_count == 30


def test_gaussian_1d_window():
    m = estimate_gaussian([1.0, 2.0, 3.0])
    assert m.cov.shape == (1, 1) and m.cov[0, 0] == pytest.approx(1.0)


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        estimate_gaussian(np.ones((1, 2)))
    with pytest.raises(TooFewSamples):
        estimate_lognormal(np.ones((2, 1)))


def test_cross_cov_matches_numpy(rng):
    a, b = rng.normal(size=(25, 2)), rng.normal(size=(25, 2))
    full = np.cov(np.hstack([a, b]), rowvar=False)
    np.testing.assert_allclose(estimate_cross_cov(a, b), full[:2, 2:])
    with pytest.raises(ShapeMismatch):
        estimate_cross_cov(a, b[:-1])


def test_log_returns():
    np.testing.assert_allclose(log_returns([1.0, np.e, 1.0]).ravel(), [1.0, -1.0])
    with pytest.raises(NonPositivePrice):
        log_returns([1.0, 0.0, 2.0])


def test_lognormal_moments_scalar():
    mom = lognormal_moments([0.1], [[0.04]])
    assert mom.mean_x[0] == pytest.approx(np.exp(0.1 + 0.02))
    assert mom.cross_cov[0, 0] == pytest.approx(np.exp(0.24) * np.expm1(0.04))
    assert mom.second_moment[0, 0] == pytest.approx(np.exp(0.2 + 0.08))


def test_lognormal_moments_monte_carlo(rng):
    theta = np.array([0.05, -0.1])
    delta = np.array([[0.04, 0.01], [0.01, 0.09]])
    z = rng.multivariate_normal(theta, delta, size=400_000)
    x = np.exp(z)
    mom = lognormal_moments(theta, delta)
    np.testing.assert_allclose(x.mean(axis=0), mom.mean_x, rtol=5e-3)
    np.testing.assert_allclose(np.cov(x, rowvar=False), mom.cross_cov, rtol=3e-2)


def test_lognormal_moments_rejects_indefinite():
    with pytest.raises(NotPSD):
        lognormal_moments([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])


def test_estimate_lognormal(rng):
    r = rng.normal(0.001, 0.02, size=(200, 1))
    prices = 50 * np.exp(np.vstack([[0.0], np.cumsum(r, axis=0)]))
    m = estimate_lognormal(prices)
    np.testing.assert_allclose(m.theta, r.mean(axis=0))
    assert m.mean[0] == pytest.approx(np.exp(m.theta[0] + 0.5 * m.delta[0, 0]))
    assert m.sample_count == 200


def test_build_dataset_gaussian(rng):
    windows = rng.normal(size=(4, 20, 2))
    ds = build_dataset(windows, labels_true=[0, 0, 1, 1])
    assert len(ds) == 4 and ds.dim == 2
    assert ds.cross_cov.shape == (4, 4, 2, 2)
    np.testing.assert_allclose(ds.cross_cov[1, 3], estimate_cross_cov(windows[1], windows[3]))
    np.testing.assert_allclose(ds.cross_cov[3, 1], ds.cross_cov[1, 3].T)
    np.testing.assert_allclose(ds.cross_cov[2, 2], ds.models[2].cov)
    np.testing.assert_allclose(ds.cross_trace, np.trace(ds.cross_cov, axis1=2, axis2=3))


def test_build_dataset_lognormal(rng):
    r = rng.normal(0, 0.02, size=(3, 50, 1))
    prices = 10 * np.exp(np.cumsum(r, axis=1))
    ds = build_dataset(prices, family=LOGNORMAL)
    assert ds.samples.shape == (3, 49, 1)
    # off-diagonal block from the joint log-space covariance
    lr = np.diff(np.log(prices), axis=1)
    d01 = estimate_cross_cov(lr[0], lr[1])
    want = ds.models[0].mean[0] * ds.models[1].mean[0] * np.expm1(d01[0, 0])
    assert ds.cross_cov[0, 1, 0, 0] == pytest.approx(want)
    np.testing.assert_allclose(cross_cov_between(prices, prices, LOGNORMAL)[0, 1], ds.cross_cov[0, 1])


def test_build_dataset_validation(rng):
    with pytest.raises(ShapeMismatch):
        build_dataset([np.ones((5, 2)), np.ones((4, 2))])
    with pytest.raises(ShapeMismatch):
        build_dataset(rng.normal(size=(1, 5, 2)))
    with pytest.raises(ShapeMismatch):
        build_dataset(rng.normal(size=(3, 5, 2)), labels_true=[0, 1])
    with pytest.raises(ValueError):
        build_dataset(rng.normal(size=(3, 5, 2)), family="cauchy")


def test_cross_cov_between(rng):
    a, b = rng.normal(size=(2, 15, 2)), rng.normal(size=(3, 15, 2))
    out = cross_cov_between(a, b)
    assert out.shape == (2, 3, 2, 2)
    np.testing.assert_allclose(out[1, 2], estimate_cross_cov(a[1], b[2]))
