"""Wasserstein barycenters of Gaussian moments and member-to-center covariances."""

import logging
from dataclasses import dataclass

import numpy as np

from .distances import DistanceKind, as_moments, optimal_coupling_cov
from .exceptions import DimMismatch, EmptyCluster, NoConvergence, SingularIterate
from .psd import clamped_eigh, psd_sqrt, psd_sqrt_and_inv_sqrt, symmetrize

log = logging.getLogger(__name__)

TOL = 1e-10
MAX_ITER = 500
SINGULAR_RATIO = 1e-12


@dataclass(frozen=True)
class BarycenterResult:
    mean: np.ndarray
    cov: np.ndarray
    iterations: int
    residual: float
    converged: bool = True
    residuals: tuple = ()


def _stack(models):
    pairs = [as_moments(m) for m in models]
    if not pairs:
        raise EmptyCluster("barycenter of an empty set")
    dims = {p[0].shape[0] for p in pairs}
    if len(dims) != 1:
        raise DimMismatch(f"models have different dimensions: {sorted(dims)}")
    return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs])


def barycenter_cov(covs, init=None, tol=TOL, max_iter=MAX_ITER, strict=False):
    """Fixed-point iteration for the barycenter covariance of a stack of covariances.

    Returns ``(cov, iterations, residual, converged, residual_history)``.
    ``init`` defaults to the average covariance.
    """
    covs = symmetrize(np.asarray(covs, dtype=float))
    if len(covs) == 1:
        return covs[0].copy(), 0, 0.0, True, ()
    if not np.any(covs):
        return np.zeros_like(covs[0]), 0, 0.0, True, ()

    w, _ = clamped_eigh(covs)
    inputs_nonsingular = bool(np.any(w.min(axis=1) > SINGULAR_RATIO * w.max(axis=1)))

    current = covs.mean(axis=0) if init is None else symmetrize(np.asarray(init, dtype=float))
    best, best_res = current, np.inf
    history = []
    for it in range(1, max_iter + 1):
        root, inv_root, ratio = psd_sqrt_and_inv_sqrt(current)
        if inputs_nonsingular and ratio < SINGULAR_RATIO:
            raise SingularIterate(
                f"barycenter iterate became singular (eigenvalue ratio {ratio:.2e}) "
                f"at iteration {it}"
            )
        avg = psd_sqrt(symmetrize(root @ covs @ root), check=False).mean(axis=0)
        nxt = symmetrize(inv_root @ avg @ avg @ inv_root)
        res = float(np.linalg.norm(nxt - current))
        history.append(res)
        if res < best_res:
            best, best_res = nxt, res
        if res <= tol * (1.0 + np.linalg.norm(current)):
            return nxt, it, res, True, tuple(history)
        current = nxt

    msg = f"barycenter did not converge in {max_iter} iterations (residual {best_res:.3e})"
    if strict:
        err = NoConvergence(msg)
        err.result = (best, max_iter, best_res, False, tuple(history))
        raise err
    log.warning(msg)
    return best, max_iter, best_res, False, tuple(history)


def barycenter(models, init=None, tol=TOL, max_iter=MAX_ITER, strict=False):
    """W2 barycenter of a set of Gaussian moments.

    The mean is the average of the member means; the covariance is the
    fixed point of ``S <- S^{-1/2} (mean_i (S^{1/2} S_i S^{1/2})^{1/2})^2 S^{-1/2}``,
    started from the average covariance unless ``init`` is given.

    Parameters
    ----------
    models : sequence
        Model objects with ``mean``/``cov`` or ``(mean, cov)`` pairs.
    init : ndarray, optional
        Starting covariance (warm start).
    strict : bool
        Raise :class:`NoConvergence` instead of returning a flagged result.
    """
    means, covs = _stack(models)
    cov, iters, res, ok, hist = barycenter_cov(covs, init=init, tol=tol, max_iter=max_iter, strict=strict)
    return BarycenterResult(
        mean=means.mean(axis=0), cov=cov, iterations=iters, residual=res,
        converged=ok, residuals=hist,
    )


def center_cross_cov(ds, member, cluster, kind):
    """Covariance between model ``member`` and the center of ``cluster``.

    For ``ED`` this averages the estimated cross-covariances
    ``ds.cross_cov[member, j]`` over the cluster; for ``W2`` it averages the
    optimal-coupling covariances between ``member`` and each cluster model.
    """
    kind = DistanceKind.parse(kind)
    cluster = np.asarray(list(cluster), dtype=int)
    if cluster.size == 0:
        raise EmptyCluster("cluster has no members")
    if kind is DistanceKind.ED:
        return ds.cross_cov[member, cluster].mean(axis=0)
    if kind is DistanceKind.W2:
        covs = ds.covs
        return np.mean([optimal_coupling_cov((ds.means[member], covs[member]), (ds.means[j], covs[j]))
                        for j in cluster], axis=0)
    raise ValueError("center_cross_cov supports W2 and ED only")
