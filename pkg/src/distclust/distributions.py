"""Distribution models and their estimation from index-aligned sample windows."""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import NonPositivePrice, ShapeMismatch, TooFewSamples
from .psd import clamped_eigh, symmetrize

GAUSSIAN = "gaussian"
LOGNORMAL = "lognormal"
FAMILIES = (GAUSSIAN, LOGNORMAL)


@dataclass(frozen=True)
class GaussianModel:
    """Mean vector and covariance of one estimated distribution."""

    mean: np.ndarray
    cov: np.ndarray
    sample_count: int = 0

    @property
    def dim(self):
        return self.mean.shape[0]


@dataclass(frozen=True)
class LognormalModel:
    """Lognormal model: log-space ``theta``/``delta`` plus the derived moments.

    ``mean`` and ``cov`` alias the derived (original-space) moments so a
    lognormal model can be handed to any distance or barycenter routine.
    """

    theta: np.ndarray
    delta: np.ndarray
    derived_mean: np.ndarray
    derived_cov: np.ndarray
    sample_count: int = 0

    @property
    def mean(self):
        return self.derived_mean

    @property
    def cov(self):
        return self.derived_cov

    @property
    def dim(self):
        return self.theta.shape[0]


class LognormalMoments(NamedTuple):
    mean_x: np.ndarray
    mean_y: np.ndarray
    second_moment: np.ndarray
    cross_cov: np.ndarray


def _window(window, min_rows=2):
    w = np.asarray(window, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    if w.ndim != 2:
        raise ShapeMismatch(f"window must be 2-D (samples x features), got shape {w.shape}")
    if w.shape[0] < min_rows:
        raise TooFewSamples(f"need at least {min_rows} samples, got {w.shape[0]}")
    return w


def estimate_gaussian(window):
    """Sample mean and unbiased (m - 1) covariance of an ``m x n`` window."""
    w = _window(window)
    mean = w.mean(axis=0)
    centered = w - mean
    cov = symmetrize(centered.T @ centered / (w.shape[0] - 1))
    return GaussianModel(mean=mean, cov=cov, sample_count=w.shape[0])


def estimate_cross_cov(window_i, window_j):
    """Cross-covariance of two windows whose rows are paired by index.

    Entry ``(a, b)`` is the sample covariance of feature ``a`` of
    ``window_i`` with feature ``b`` of ``window_j``. The result is not
    symmetrized.
    """
    wi = _window(window_i)
    wj = _window(window_j)
    if wi.shape != wj.shape:
        raise ShapeMismatch(f"window shapes differ: {wi.shape} vs {wj.shape}")
    ci = wi - wi.mean(axis=0)
    cj = wj - wj.mean(axis=0)
    return ci.T @ cj / (wi.shape[0] - 1)


def log_returns(prices):
    """``ln(p[t] / p[t-1])`` row-wise for a positive ``m x n`` price window."""
    p = np.asarray(prices, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    if np.any(~(p > 0)):
        raise NonPositivePrice("prices must be strictly positive")
    return np.diff(np.log(p), axis=0)


def lognormal_moments(theta_x, delta_x, theta_y=None, delta_y=None, delta_cross=None):
    """Original-space moments of (jointly) lognormal vectors.

    With only ``theta_x``/``delta_x`` this is the self case ``Y = X``.
    ``delta_cross`` is the log-space cross-covariance between ``ln X`` and
    ``ln Y``; it defaults to ``delta_x`` in the self case and to zero otherwise.
    """
    theta_x = np.atleast_1d(np.asarray(theta_x, dtype=float))
    delta_x = np.atleast_2d(np.asarray(delta_x, dtype=float))
    self_case = theta_y is None and delta_y is None
    if self_case:
        theta_y, delta_y = theta_x, delta_x
        if delta_cross is None:
            delta_cross = delta_x
    theta_y = np.atleast_1d(np.asarray(theta_y, dtype=float))
    delta_y = np.atleast_2d(np.asarray(delta_y, dtype=float))
    if delta_cross is None:
        delta_cross = np.zeros((theta_x.shape[0], theta_y.shape[0]))
    delta_cross = np.atleast_2d(np.asarray(delta_cross, dtype=float))
    clamped_eigh(symmetrize(delta_x))
    if not self_case:
        clamped_eigh(symmetrize(delta_y))

    dx = np.diag(delta_x)
    dy = np.diag(delta_y)
    mean_x = np.exp(theta_x + 0.5 * dx)
    mean_y = np.exp(theta_y + 0.5 * dy)
    second = np.exp(
        theta_x[:, None] + theta_y[None, :]
        + 0.5 * (dx[:, None] + dy[None, :] + 2.0 * delta_cross)
    )
    cross = np.outer(mean_x, mean_y) * np.expm1(delta_cross)
    return LognormalMoments(mean_x, mean_y, second, cross)


def estimate_lognormal(window):
    """Fit a lognormal model to a window of price levels via log-returns."""
    w = _window(window, min_rows=3)
    est = estimate_gaussian(log_returns(w))
    mom = lognormal_moments(est.mean, est.cov)
    return LognormalModel(
        theta=est.mean,
        delta=est.cov,
        derived_mean=mom.mean_x,
        derived_cov=symmetrize(mom.cross_cov),
        sample_count=est.sample_count,
    )


@dataclass
class DistributionDataset:
    """N estimated models, their full cross-covariance table and raw windows.

    Attributes
    ----------
    models : list
        ``GaussianModel`` or ``LognormalModel`` instances, one per window.
    cross_cov : ndarray, shape (N, N, n, n)
        ``cross_cov[i, j]`` is the covariance between distributions i and j.
    windows : ndarray, shape (N, m, n)
        Raw input windows (price levels for the lognormal family).
    labels_true : ndarray or None
        Ground-truth cluster per model.
    family : str
        ``"gaussian"`` or ``"lognormal"``.
    """

    models: list
    cross_cov: np.ndarray
    windows: np.ndarray
    labels_true: Optional[np.ndarray] = None
    family: str = GAUSSIAN
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self):
        return len(self.models)

    @property
    def dim(self):
        return self.windows.shape[2]

    @property
    def means(self):
        if "means" not in self._cache:
            self._cache["means"] = np.stack([m.mean for m in self.models])
        return self._cache["means"]

    @property
    def covs(self):
        if "covs" not in self._cache:
            self._cache["covs"] = np.stack([m.cov for m in self.models])
        return self._cache["covs"]

    @property
    def cross_trace(self):
        """``trace(cross_cov[i, j])`` for all pairs."""
        if "cross_trace" not in self._cache:
            self._cache["cross_trace"] = np.trace(self.cross_cov, axis1=2, axis2=3)
        return self._cache["cross_trace"]

    @property
    def samples(self):
        """Raw samples each distribution was estimated from, shape (N, m', n).

        Gaussian windows are returned as-is. For the lognormal family these
        are the gross returns ``p[t] / p[t-1]``, the lognormal variables.
        """
        if self.family == LOGNORMAL:
            return np.exp(np.diff(np.log(self.windows), axis=1))
        return self.windows


def _pairwise_blocks(stacked):
    """Index-paired sample cross-covariances for a stack ``(N, m, n)``."""
    n_models, m, n = stacked.shape
    centered = stacked - stacked.mean(axis=1, keepdims=True)
    flat = centered.transpose(0, 2, 1).reshape(n_models * n, m)
    big = symmetrize(flat @ flat.T / (m - 1))
    return big.reshape(n_models, n, n_models, n).transpose(0, 2, 1, 3)


def build_dataset(windows, family=GAUSSIAN, labels_true=None):
    """Estimate one model per window plus the full cross-covariance table.

    Parameters
    ----------
    windows : sequence of array_like or ndarray, shape (N, m, n)
        Equal-shape windows; rows are paired by index across windows.
    family : {"gaussian", "lognormal"}
    labels_true : array_like of int, optional

    Returns
    -------
    DistributionDataset
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    shapes = {np.shape(_window(w, min_rows=1)) for w in windows}
    if len(shapes) != 1:
        raise ShapeMismatch(f"all windows must share one shape, got {sorted(shapes)}")
    stacked = np.stack([_window(w, min_rows=3 if family == LOGNORMAL else 2) for w in windows])
    if stacked.shape[0] < 2:
        raise ShapeMismatch("need at least two windows")
    if labels_true is not None:
        labels_true = np.asarray(labels_true, dtype=int)
        if labels_true.shape != (stacked.shape[0],):
            raise ShapeMismatch("labels_true must have one entry per window")

    if family == GAUSSIAN:
        models = [estimate_gaussian(w) for w in stacked]
        cross = _pairwise_blocks(stacked)
        for i, mdl in enumerate(models):
            cross[i, i] = mdl.cov
    else:
        models = [estimate_lognormal(w) for w in stacked]
        returns = np.stack([log_returns(w) for w in stacked])
        delta_cross = _pairwise_blocks(returns)
        mu = np.stack([mdl.derived_mean for mdl in models])
        cross = mu[:, None, :, None] * mu[None, :, None, :] * np.expm1(delta_cross)
        for i, mdl in enumerate(models):
            cross[i, i] = mdl.derived_cov
    return DistributionDataset(
        models=models,
        cross_cov=np.ascontiguousarray(cross),
        windows=stacked,
        labels_true=labels_true,
        family=family,
    )


def cross_cov_between(windows_a, windows_b, family=GAUSSIAN):
    """Index-paired cross-covariances between two stacks of windows.

    Returns an array of shape ``(len(windows_a), len(windows_b), n, n)``;
    entry ``[i, j]`` has rows indexed by the features of ``windows_a[i]``.
    """
    a = np.asarray(windows_a, dtype=float)
    b = np.asarray(windows_b, dtype=float)
    if a.ndim != 3 or b.ndim != 3 or a.shape[1:] != b.shape[1:]:
        raise ShapeMismatch(f"window stacks do not align: {a.shape} vs {b.shape}")
    if family == LOGNORMAL:
        ra = np.diff(np.log(a), axis=1)
        rb = np.diff(np.log(b), axis=1)
        ca = ra - ra.mean(axis=1, keepdims=True)
        cb = rb - rb.mean(axis=1, keepdims=True)
        delta = np.einsum("itp,jtq->ijpq", ca, cb) / (ra.shape[1] - 1)
        mu_a = np.stack([estimate_lognormal(w).derived_mean for w in a])
        mu_b = np.stack([estimate_lognormal(w).derived_mean for w in b])
        return mu_a[:, None, :, None] * mu_b[None, :, None, :] * np.expm1(delta)
    ca = a - a.mean(axis=1, keepdims=True)
    cb = b - b.mean(axis=1, keepdims=True)
    return np.einsum("itp,jtq->ijpq", ca, cb) / (a.shape[1] - 1)
