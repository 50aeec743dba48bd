"""K-means and K-medoids over raw points and over estimated distributions.

Six engines share one alternating assign/update loop:

========  ==========================  ==============================
name      space                       center update
========  ==========================  ==============================
km        raw points                  arithmetic mean
kmd       raw points                  medoid (min sum of sq. dist.)
wkm/ekm   distributions (W2 / ED)     W2 barycenter
wkmd/ekmd distributions (W2 / ED)     medoid over pairwise table
========  ==========================  ==============================
"""

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .barycenter import barycenter_cov
from .distances import DistanceKind, ed_squared_from_traces, pairwise_matrix, w2_squared_to_many
from .exceptions import InputError, KTooLarge, LengthMismatch

RANDOM_POINTS = "random_points"
GIVEN_INDICES = "given_indices"


@dataclass
class ClusterConfig:
    """Run settings shared by every engine.

    ``init="given_indices"`` starts from ``init_indices`` and performs a
    single run; ``"random_points"`` draws ``k`` distinct members per restart.
    """

    k: int
    max_iters: int = 300
    seed: int = 0
    init: str = RANDOM_POINTS
    restarts: int = 10
    init_indices: Optional[Sequence[int]] = None

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be positive")
        if self.restarts < 1:
            raise InputError("restarts must be at least 1")
        if self.max_iters < 1:
            raise InputError("max_iters must be positive")
        if self.init not in (RANDOM_POINTS, GIVEN_INDICES):
            raise InputError(f"unknown init {self.init!r}")
        if self.init == GIVEN_INDICES:
            if self.init_indices is None or len(self.init_indices) != self.k:
                raise InputError("given_indices init needs exactly k init_indices")


@dataclass
class ClusteringResult:
    """Outcome of one clustering call (best run over restarts).

    ``centers`` holds a ``(k, n)`` array of means for raw K-means, a list of
    ``(mean, cov)`` pairs for distributional K-means, and an int array of
    medoid indices for every K-medoids variant.
    """

    labels: np.ndarray
    centers: object
    iterations: int
    objective: float
    wall_time_seconds: float
    algorithm: str = ""
    objective_history: list = field(default_factory=list)
    converged: bool = True


def _check_k(n_items, cfg):
    if cfg.k > n_items:
        raise KTooLarge(f"k={cfg.k} exceeds the {n_items} items to cluster")
    if cfg.init == GIVEN_INDICES:
        idx = np.asarray(cfg.init_indices, dtype=int)
        if len(set(idx.tolist())) != cfg.k or idx.min() < 0 or idx.max() >= n_items:
            raise InputError("init_indices must be k distinct valid indices")


def _initial_indices(n_items, cfg):
    if cfg.init == GIVEN_INDICES:
        return [np.asarray(cfg.init_indices, dtype=int)]
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    return [np.random.default_rng(s).choice(n_items, size=cfg.k, replace=False) for s in seqs]


def _assign(dist):
    """Nearest center per row (lowest index on ties), then empty-cluster repair.

    An empty cluster is reseeded with the item farthest from its current
    center, taken from a cluster that keeps at least one member.
    """
    labels = np.argmin(dist, axis=1)
    k = dist.shape[1]
    own = dist[np.arange(len(labels)), labels]
    counts = np.bincount(labels, minlength=k)
    for c in range(k):
        if counts[c]:
            continue
        donors = counts[labels] > 1
        cand = np.where(donors, own, -np.inf)
        i = int(np.argmax(cand))
        counts[labels[i]] -= 1
        labels[i] = c
        counts[c] = 1
        own[i] = -np.inf
    return labels


def _lloyd(n_items, start, init_centers, distances, update, max_iters):
    """Alternate assignment and center update until the labels stop changing.

    Returns ``(labels, centers, iterations, objective, history, converged)``
    where ``history[t]`` is the objective after the t-th center update.
    """
    centers = init_centers(start)
    labels = None
    history = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        dist = distances(centers)
        if labels is not None:
            history.append(float(np.sum(dist[np.arange(n_items), labels])))
        new = _assign(dist)
        if labels is not None and np.array_equal(new, labels):
            converged = True
            break
        labels = new
        centers = update(labels, centers)
    if not converged:
        dist = distances(centers)
        history.append(float(np.sum(dist[np.arange(n_items), labels])))
    return labels, centers, it, history[-1], history, converged


def _best_of(n_items, cfg, init_centers, distances, update, algorithm, extra_time=0.0):
    _check_k(n_items, cfg)
    t0 = time.perf_counter()
    best = None
    for start in _initial_indices(n_items, cfg):
        run = _lloyd(n_items, start, init_centers, distances, update, cfg.max_iters)
        if best is None or run[3] < best[3]:
            best = run
    elapsed = time.perf_counter() - t0 + extra_time
    labels, centers, iters, obj, hist, ok = best
    return ClusteringResult(
        labels=labels, centers=centers, iterations=iters, objective=obj,
        wall_time_seconds=elapsed, algorithm=algorithm,
        objective_history=hist, converged=ok,
    )


def _sq_dist_to(points, centers):
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("ikn,ikn->ik", diff, diff)


def _as_points(points):
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"points must be 2-D, got shape {x.shape}")
    return x


def _cluster_means(points, labels, k):
    counts = np.bincount(labels, minlength=k).astype(float)
    sums = np.stack([np.bincount(labels, weights=points[:, d], minlength=k)
                     for d in range(points.shape[1])], axis=1)
    return sums / counts[:, None]


def kmeans_raw(points, cfg):
    """Lloyd K-means on raw points with squared Euclidean distance."""
    x = _as_points(points)
    k = cfg.k
    return _best_of(
        len(x), cfg,
        init_centers=lambda idx: x[idx].copy(),
        distances=lambda c: _sq_dist_to(x, c),
        update=lambda labels, c: _cluster_means(x, labels, k),
        algorithm="km",
    )


def _raw_medoids(x, labels, k):
    # sum_j |x_i - x_j|^2 = |S| |x_i - mean|^2 + const, so the medoid is the
    # member nearest the cluster mean
    means = _cluster_means(x, labels, k)
    out = np.empty(k, dtype=int)
    for c in range(k):
        members = np.flatnonzero(labels == c)
        d = np.sum((x[members] - means[c]) ** 2, axis=1)
        out[c] = members[np.argmin(d)]
    return out


def kmedoids_raw(points, cfg):
    """Voronoi-iteration K-medoids on raw points with squared Euclidean distance."""
    x = _as_points(points)
    k = cfg.k
    return _best_of(
        len(x), cfg,
        init_centers=lambda idx: np.array(idx, dtype=int),
        distances=lambda med: _sq_dist_to(x, x[med]),
        update=lambda labels, med: _raw_medoids(x, labels, k),
        algorithm="kmd",
    )


class _DistributionalCenters:
    """Center state for distributional K-means: barycenters plus member sets."""

    def __init__(self, ds, kind):
        self.kind = DistanceKind.parse(kind)
        if self.kind not in (DistanceKind.W2, DistanceKind.ED):
            raise ValueError("distributional clustering uses W2 or ED")
        self.means = ds.means
        self.covs = ds.covs
        self.traces = np.trace(self.covs, axis1=1, axis2=2)
        self.cross_trace = ds.cross_trace if self.kind is DistanceKind.ED else None
        # restarts revisit the same member sets; barycenters depend on members only
        self._bary = {}

    def init(self, idx):
        return [(self.means[i].copy(), self.covs[i].copy(), np.array([i])) for i in idx]

    def distances(self, centers):
        cols = []
        for mean, cov, members in centers:
            if self.kind is DistanceKind.W2:
                cols.append(w2_squared_to_many((mean, cov), self.means, self.covs))
            else:
                sq = np.sum((self.means - mean) ** 2, axis=1)
                cross = self.cross_trace[:, members].mean(axis=1)
                cols.append(ed_squared_from_traces(sq, self.traces, np.trace(cov), cross))
        return np.stack(cols, axis=1)

    def update(self, labels, centers):
        out = []
        for c, (_, _, prev_members) in enumerate(centers):
            members = np.flatnonzero(labels == c)
            if np.array_equal(members, prev_members):
                out.append(centers[c])
                continue
            key = members.tobytes()
            if key not in self._bary:
                self._bary[key] = barycenter_cov(self.covs[members])[0]
            cov = self._bary[key]
            out.append((self.means[members].mean(axis=0), cov, members))
        return out


def cluster_distributions_kmeans(ds, kind, cfg):
    """Distributional K-means (WKM for ``kind="w2"``, EKM for ``kind="ed"``).

    Each model is assigned to the nearest center by squared W2, or by the
    squared expectation distance whose member-to-center cross-covariance is
    the average of the model's cross-covariances with the cluster's members.
    Centers are W2 barycenters of their members in both cases.
    """
    state = _DistributionalCenters(ds, kind)
    res = _best_of(
        len(ds), cfg,
        init_centers=state.init,
        distances=state.distances,
        update=state.update,
        algorithm="wkm" if state.kind is DistanceKind.W2 else "ekm",
    )
    res.centers = [(mean, cov) for mean, cov, _ in res.centers]
    return res


def _table_medoids(table, labels, k):
    out = np.empty(k, dtype=int)
    for c in range(k):
        members = np.flatnonzero(labels == c)
        cost = table[np.ix_(members, members)].sum(axis=1)
        out[c] = members[np.argmin(cost)]
    return out


def kmedoids_table(table, cfg, algorithm="kmedoids"):
    """K-medoids on a precomputed table of squared distances."""
    table = np.asarray(table, dtype=float)
    k = cfg.k
    return _best_of(
        table.shape[0], cfg,
        init_centers=lambda idx: np.array(idx, dtype=int),
        distances=lambda med: table[:, med],
        update=lambda labels, med: _table_medoids(table, labels, k),
        algorithm=algorithm,
    )


def cluster_distributions_kmedoids(ds, kind, cfg):
    """Distributional K-medoids (WKMd / EKMd) over the pairwise distance table.

    The reported wall time includes building the table.
    """
    kind = DistanceKind.parse(kind)
    _check_k(len(ds), cfg)
    t0 = time.perf_counter()
    table = pairwise_matrix(ds, kind)
    build = time.perf_counter() - t0
    algorithm = "wkmd" if kind is DistanceKind.W2 else "ekmd"
    res = kmedoids_table(table, cfg, algorithm=algorithm)
    res.wall_time_seconds += build
    return res


def raw_points(ds):
    """All raw samples of ``ds`` stacked window by window, shape (N*m, n)."""
    s = ds.samples
    return s.reshape(-1, s.shape[2])


def propagate_labels(ds, result):
    """Give every raw sample the cluster label of its window's distribution."""
    labels = np.asarray(getattr(result, "labels", result))
    if labels.shape[0] != len(ds):
        raise LengthMismatch(f"{labels.shape[0]} labels for {len(ds)} distributions")
    return np.repeat(labels, ds.samples.shape[1])


ENGINES = ("km", "kmd", "wkm", "ekm", "wkmd", "ekmd")


def run_engine(name, ds, cfg):
    """Dispatch one of :data:`ENGINES` on a dataset.

    Raw engines cluster :func:`raw_points`; distributional engines cluster
    the models. Returned labels are per raw sample for raw engines and per
    model otherwise.
    """
    if name == "km":
        return kmeans_raw(raw_points(ds), cfg)
    if name == "kmd":
        return kmedoids_raw(raw_points(ds), cfg)
    if name in ("wkm", "ekm"):
        return cluster_distributions_kmeans(ds, "w2" if name == "wkm" else "ed", cfg)
    if name in ("wkmd", "ekmd"):
        return cluster_distributions_kmedoids(ds, "w2" if name == "wkmd" else "ed", cfg)
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ENGINES}")
