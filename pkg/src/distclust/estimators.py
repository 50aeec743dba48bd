"""scikit-learn compatible estimators wrapping the clustering engines.

Raw-data estimators take the usual ``(n_samples, n_features)`` matrix.
Distributional estimators take either a :class:`DistributionDataset` or a
stack of equal-shape windows ``(n_windows, window_length, n_features)``;
each window is reduced to one estimated distribution and the windows are
clustered as a whole.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .clustering import (
    ClusterConfig,
    cluster_distributions_kmeans,
    cluster_distributions_kmedoids,
    kmeans_raw,
    kmedoids_raw,
    propagate_labels,
)
from .distances import DistanceKind, ed_squared_from_traces, w2_squared_to_many
from .distributions import (
    FAMILIES,
    DistributionDataset,
    build_dataset,
    cross_cov_between,
    estimate_gaussian,
    estimate_lognormal,
    GAUSSIAN,
)


def _seed(random_state):
    if random_state is None:
        return int(np.random.SeedSequence().entropy % 2 ** 63)
    if isinstance(random_state, (int, np.integer)):
        return int(random_state)
    if isinstance(random_state, np.random.RandomState):
        return int(random_state.randint(0, 2 ** 31 - 1))
    raise ValueError(f"random_state must be None, an int or a RandomState, got {random_state!r}")


class _ConfigMixin:
    def _config(self):
        if not isinstance(self.n_clusters, (int, np.integer)) or self.n_clusters < 1:
            raise ValueError(f"n_clusters must be a positive int, got {self.n_clusters!r}")
        return ClusterConfig(k=int(self.n_clusters), max_iters=self.max_iter,
                             seed=_seed(self.random_state), restarts=self.n_init)

    def _store(self, result):
        self.result_ = result
        self.labels_ = result.labels
        self.inertia_ = result.objective
        self.n_iter_ = result.iterations


def _sq_dists(x, centers):
    diff = x[:, None, :] - centers[None, :, :]
    return np.einsum("ikn,ikn->ik", diff, diff)


class KMeans(_ConfigMixin, ClusterMixin, TransformerMixin, BaseEstimator):
    """Lloyd K-means on raw samples, best of ``n_init`` random-point starts.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters, n_features)
    labels_ : ndarray of shape (n_samples,)
    inertia_ : float
        Sum of squared distances to the assigned centers.
    n_iter_ : int
    """

    def __init__(self, n_clusters=8, *, max_iter=300, n_init=10, random_state=None):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.n_init = n_init
        self.random_state = random_state

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        res = kmeans_raw(X, self._config())
        self._store(res)
        self.cluster_centers_ = res.centers
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return _sq_dists(X, self.cluster_centers_)

    def predict(self, X):
        return np.argmin(self.transform(X), axis=1)


class KMedoids(KMeans):
    """Voronoi-iteration K-medoids on raw samples (squared Euclidean).

    Attributes
    ----------
    medoid_indices_ : ndarray of shape (n_clusters,)
    cluster_centers_ : ndarray of shape (n_clusters, n_features)
    """

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        res = kmedoids_raw(X, self._config())
        self._store(res)
        self.medoid_indices_ = res.centers
        self.cluster_centers_ = X[res.centers]
        return self


class _DistributionalBase(_ConfigMixin, ClusterMixin, BaseEstimator):
    def __init__(self, n_clusters=8, *, metric="ed", family=GAUSSIAN, max_iter=300,
                 n_init=10, random_state=None):
        self.n_clusters = n_clusters
        self.metric = metric
        self.family = family
        self.max_iter = max_iter
        self.n_init = n_init
        self.random_state = random_state

    def _kind(self):
        kind = DistanceKind.parse(self.metric)
        if kind is DistanceKind.EUCLIDEAN:
            raise ValueError("metric must be 'w2' or 'ed'")
        return kind

    def _windows(self, X):
        X = check_array(X, allow_nd=True, dtype=np.float64, ensure_2d=False)
        if X.ndim == 2:
            X = X[:, :, None]
        if X.ndim != 3:
            raise ValueError(f"expected windows of shape (n_windows, length, n_features), got {X.shape}")
        return X

    def _dataset(self, X, y):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if isinstance(X, DistributionDataset):
            return X
        return build_dataset(self._windows(X), family=self.family, labels_true=y)

    def fit(self, X, y=None):
        """Estimate one distribution per window and cluster them.

        ``y`` (optional ground truth per window) is stored on ``dataset_``
        and otherwise ignored.
        """
        kind = self._kind()
        ds = self._dataset(X, y)
        self.dataset_ = ds
        self.n_features_in_ = ds.dim
        self._store(self._run(ds, kind, self._config()))
        self.sample_labels_ = propagate_labels(ds, self.result_)
        return self

    def _moments(self, X):
        W = self._windows(X)
        if W.shape[2] != self.n_features_in_:
            raise ValueError(f"X has {W.shape[2]} features, expected {self.n_features_in_}")
        est = estimate_lognormal if self.family == "lognormal" else estimate_gaussian
        models = [est(w) for w in W]
        return W, np.stack([m.mean for m in models]), np.stack([m.cov for m in models])

    def transform(self, X):
        """Squared distances from each new window's distribution to every center."""
        check_is_fitted(self)
        return self._center_distances(*self._moments(X))

    def predict(self, X):
        return np.argmin(self.transform(X), axis=1)


class DistributionalKMeans(_DistributionalBase):
    """K-means over estimated distributions with W2 barycenter centers.

    ``metric="w2"`` gives WKM and ``metric="ed"`` gives EKM. The expectation
    distance to a center uses the average cross-covariance between the
    window and the center's member windows, so new windows passed to
    :meth:`predict` must have the training window length.

    Attributes
    ----------
    cluster_means_ : ndarray of shape (n_clusters, n_features)
    cluster_covs_ : ndarray of shape (n_clusters, n_features, n_features)
    labels_ : ndarray of shape (n_windows,)
    sample_labels_ : ndarray
        Cluster of every raw sample, window by window.
    """

    def _run(self, ds, kind, cfg):
        res = cluster_distributions_kmeans(ds, kind, cfg)
        self.cluster_means_ = np.stack([m for m, _ in res.centers])
        self.cluster_covs_ = np.stack([c for _, c in res.centers])
        return res

    def _center_distances(self, W, means, covs):
        kind = self._kind()
        cols = []
        for c in range(len(self.cluster_means_)):
            center = (self.cluster_means_[c], self.cluster_covs_[c])
            if kind is DistanceKind.W2:
                cols.append(w2_squared_to_many(center, means, covs))
                continue
            members = np.flatnonzero(self.labels_ == c)
            cross = cross_cov_between(W, self.dataset_.windows[members], self.family)
            tr_cross = np.trace(cross, axis1=2, axis2=3).mean(axis=1)
            sq = np.sum((means - center[0]) ** 2, axis=1)
            cols.append(ed_squared_from_traces(
                sq, np.trace(covs, axis1=1, axis2=2), np.trace(center[1]), tr_cross))
        return np.stack(cols, axis=1)


class DistributionalKMedoids(_DistributionalBase):
    """K-medoids over estimated distributions (WKMd / EKMd).

    Attributes
    ----------
    medoid_indices_ : ndarray of shape (n_clusters,)
        Indices of the medoid windows in the training set.
    """

    def _run(self, ds, kind, cfg):
        res = cluster_distributions_kmedoids(ds, kind, cfg)
        self.medoid_indices_ = res.centers
        return res

    def _center_distances(self, W, means, covs):
        ds = self.dataset_
        med = self.medoid_indices_
        if self._kind() is DistanceKind.W2:
            return np.stack([w2_squared_to_many((ds.means[m], ds.covs[m]), means, covs)
                             for m in med], axis=1)
        cross = cross_cov_between(W, ds.windows[med], self.family)
        sq = np.sum((means[:, None, :] - ds.means[med][None]) ** 2, axis=2)
        tr = np.trace(covs, axis1=1, axis2=2)[:, None]
        tr_med = np.trace(ds.covs[med], axis1=1, axis2=2)[None, :]
        return ed_squared_from_traces(sq, tr, tr_med, np.trace(cross, axis1=2, axis2=3))


class MomentEstimator(TransformerMixin, BaseEstimator):
    """Turn windows into flat moment features ``[mean, upper(cov)]``.

    Useful for feeding estimated distributions to ordinary estimators in a
    :class:`sklearn.pipeline.Pipeline`.
    """

    def __init__(self, family=GAUSSIAN):
        self.family = family

    def fit(self, X, y=None):
        X = check_array(X, allow_nd=True, dtype=np.float64, ensure_2d=False)
        if X.ndim == 2:
            X = X[:, :, None]
        self.n_features_in_ = X.shape[2]
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_array(X, allow_nd=True, dtype=np.float64, ensure_2d=False)
        if X.ndim == 2:
            X = X[:, :, None]
        if X.shape[2] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[2]} features, expected {self.n_features_in_}")
        est = estimate_lognormal if self.family == "lognormal" else estimate_gaussian
        iu = np.triu_indices(self.n_features_in_)
        rows = []
        for w in X:
            m = est(w)
            rows.append(np.concatenate([m.mean, m.cov[iu]]))
        return np.asarray(rows)
