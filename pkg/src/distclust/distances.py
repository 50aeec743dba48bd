"""Closed-form 2-Wasserstein and expectation distances between distributions.

All functions return *squared* distances.
"""

import enum
import logging

import numpy as np

from .exceptions import DimMismatch
from .psd import psd_sqrt, symmetrize, trace_sqrt

log = logging.getLogger(__name__)

#: raw values in (-SILENT_CLAMP, 0) are rounding noise and clamped quietly
SILENT_CLAMP = 1e-12
#: raw expectation distances below -WARN_CLAMP indicate an inconsistent cross input
WARN_CLAMP = 1e-6

_clamp_warnings = 0


class DistanceKind(enum.Enum):
    W2 = "w2"
    ED = "ed"
    EUCLIDEAN = "euclidean"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown distance {value!r}; expected one of {[k.value for k in cls]}"
            ) from None


def clamp_warning_count():
    """Number of expectation distances clamped from below ``-WARN_CLAMP``."""
    return _clamp_warnings


def reset_clamp_warnings():
    global _clamp_warnings
    _clamp_warnings = 0


def as_moments(x):
    """``(mean, cov)`` from a model object or a ``(mean, cov)`` pair."""
    if hasattr(x, "mean") and hasattr(x, "cov") and not isinstance(x, (tuple, list)):
        mean, cov = x.mean, x.cov
    else:
        mean, cov = x
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.shape != (mean.shape[0], mean.shape[0]):
        raise DimMismatch(f"mean of dim {mean.shape[0]} with covariance {cov.shape}")
    return mean, cov


def _check_dims(ma, mb):
    if ma.shape != mb.shape:
        raise DimMismatch(f"dimensions differ: {ma.shape[0]} vs {mb.shape[0]}")


def _clamp(value, warn):
    global _clamp_warnings
    value = np.asarray(value, dtype=float)
    if warn:
        bad = value < -WARN_CLAMP
        if np.any(bad):
            _clamp_warnings += int(np.count_nonzero(bad))
            log.warning(
                "expectation distance %.3e clamped to 0; cross-covariance is "
                "inconsistent with the marginals", float(value[bad].min()),
            )
    out = np.maximum(value, 0.0)
    return float(out) if out.ndim == 0 else out


def optimal_coupling_cov(a, b):
    """Cross-covariance of the optimal coupling between ``a`` and ``b``.

    ``(Sa^{1/2} Sb Sa^{1/2})^{1/2}`` for covariances ``Sa``, ``Sb``.
    """
    _, sa = as_moments(a)
    _, sb = as_moments(b)
    if sa.shape != sb.shape:
        raise DimMismatch(f"covariance shapes differ: {sa.shape} vs {sb.shape}")
    ra = psd_sqrt(sa)
    return psd_sqrt(symmetrize(ra @ sb @ ra), check=False)


def w2_squared(a, b):
    """Squared 2-Wasserstein distance between two Gaussian moment pairs."""
    ma, sa = as_moments(a)
    mb, sb = as_moments(b)
    _check_dims(ma, mb)
    ra = psd_sqrt(sa)
    cross_tr = trace_sqrt(symmetrize(ra @ sb @ ra))
    raw = np.sum((ma - mb) ** 2) + np.trace(sa) + np.trace(sb) - 2.0 * cross_tr
    return _clamp(raw, warn=False)


def w2_squared_to_many(center, means, covs):
    """Squared W2 from one ``(mean, cov)`` to each of a stack of moments."""
    mc, sc = as_moments(center)
    means = np.asarray(means, dtype=float)
    covs = np.asarray(covs, dtype=float)
    rc = psd_sqrt(sc)
    cross_tr = trace_sqrt(symmetrize(rc @ covs @ rc))
    raw = (
        np.sum((means - mc) ** 2, axis=1)
        + np.trace(covs, axis1=1, axis2=2)
        + np.trace(sc)
        - 2.0 * cross_tr
    )
    return _clamp(raw, warn=False)


def ed_squared(a, b, cross):
    """Squared expectation distance given the actual cross-covariance.

    ``cross`` is the covariance between ``a`` and ``b`` (rows index ``a``);
    only its trace enters, so it need not be symmetric.
    """
    ma, sa = as_moments(a)
    mb, sb = as_moments(b)
    _check_dims(ma, mb)
    cross = np.atleast_2d(np.asarray(cross, dtype=float))
    if cross.shape != sa.shape:
        raise DimMismatch(f"cross-covariance shape {cross.shape}, expected {sa.shape}")
    raw = np.sum((ma - mb) ** 2) + np.trace(sa) + np.trace(sb) - 2.0 * np.trace(cross)
    return _clamp(raw, warn=True)


def ed_squared_from_traces(sq_mean_diff, tr_a, tr_b, tr_cross):
    """Vectorized expectation distance from precomputed scalar pieces."""
    return _clamp(sq_mean_diff + tr_a + tr_b - 2.0 * tr_cross, warn=True)


def _sq_mean_diffs(means):
    diff = means[:, None, :] - means[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def pairwise_matrix(ds, kind):
    """Table of squared distances between every pair of models in ``ds``.

    Parameters
    ----------
    ds : DistributionDataset
    kind : DistanceKind or str
        ``W2`` or ``ED``; the expectation distance reads ``ds.cross_cov``.
    """
    kind = DistanceKind.parse(kind)
    means, covs = ds.means, ds.covs
    n_models = means.shape[0]
    if kind is DistanceKind.W2:
        out = np.zeros((n_models, n_models))
        for i in range(n_models - 1):
            out[i, i + 1:] = w2_squared_to_many((means[i], covs[i]), means[i + 1:], covs[i + 1:])
        out = out + out.T
    elif kind is DistanceKind.ED:
        traces = np.trace(covs, axis1=1, axis2=2)
        out = ed_squared_from_traces(
            _sq_mean_diffs(means), traces[:, None], traces[None, :], ds.cross_trace
        )
        out = np.atleast_2d(out)
        np.fill_diagonal(out, 0.0)
    else:
        raise ValueError("pairwise_matrix supports W2 and ED only")
    return out
