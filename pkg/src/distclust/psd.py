"""Symmetric positive-semidefinite matrix primitives."""

import numpy as np

from .exceptions import NotPSD, NotSquare, NotSymmetric

#: eigenvalues down to ``-CLAMP_RTOL * max|eig|`` are treated as rounding noise
CLAMP_RTOL = 1e-8
SYM_RTOL = 1e-10


def _as_square(m):
    m = np.asarray(m, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2] or m.shape[-1] < 1:
        raise NotSquare(f"expected square matrix, got shape {m.shape}")
    return m


def symmetrize(m):
    """Return ``(m + m.T) / 2``.

    Works on a single matrix or on a stack of matrices (last two axes).
    """
    m = _as_square(m)
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def check_symmetric(m, rtol=SYM_RTOL):
    m = _as_square(m)
    scale = max(np.max(np.abs(m), initial=0.0), 1.0)
    asym = np.max(np.abs(m - np.swapaxes(m, -1, -2)), initial=0.0)
    if asym > rtol * scale:
        raise NotSymmetric(f"matrix asymmetry {asym:.3e} exceeds {rtol:g} relative")
    return m


def trace(m):
    """Sum of diagonal entries (batched over leading axes)."""
    m = _as_square(m)
    return np.trace(m, axis1=-2, axis2=-1)


def _check_clamp(w):
    scale = np.max(np.abs(w), axis=-1, keepdims=True)
    floor = -CLAMP_RTOL * np.maximum(scale, np.finfo(float).tiny)
    if np.any(w < floor):
        raise NotPSD(f"matrix has eigenvalue {w.min():.3e} below {floor.min():.3e}")
    return np.clip(w, 0.0, None)


def clamped_eigh(m):
    """Symmetric eigendecomposition with tiny negative eigenvalues set to zero.

    Accepts a single matrix or a stack. Raises :class:`NotPSD` when an
    eigenvalue is below ``-CLAMP_RTOL`` times the largest absolute eigenvalue.
    """
    m = _as_square(m)
    w, v = np.linalg.eigh(m)
    return _check_clamp(w), v


def psd_sqrt(m, check=True):
    """Principal square root of a symmetric PSD matrix.

    Parameters
    ----------
    m : array_like, shape (..., n, n)
        Symmetric positive-semidefinite matrix or stack of them.
    check : bool
        Verify symmetry first. Internal callers that symmetrize their own
        products skip this.

    Returns
    -------
    ndarray
        Symmetric PSD ``r`` with ``r @ r`` equal to ``m`` after clamping.
    """
    m = check_symmetric(m) if check else _as_square(m)
    w, v = clamped_eigh(symmetrize(m))
    r = (v * np.sqrt(w)[..., None, :]) @ np.swapaxes(v, -1, -2)
    return symmetrize(r)


def psd_sqrt_and_inv_sqrt(m, rcond=1e-12):
    """Return ``(m^{1/2}, pinv(m)^{1/2}, min_eig / max_eig)`` for a PSD ``m``.

    Eigenvalues at or below ``rcond`` times the largest are treated as zero
    in the inverse root.
    """
    w, v = clamped_eigh(symmetrize(m))
    vt = np.swapaxes(v, -1, -2)
    root = (v * np.sqrt(w)[..., None, :]) @ vt
    top = np.max(w, axis=-1, keepdims=True)
    keep = w > rcond * top
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / np.sqrt(w[keep])
    inv = (v * inv_w[..., None, :]) @ vt
    ratio = np.where(top[..., 0] > 0, np.min(w, axis=-1) / np.where(top[..., 0] > 0, top[..., 0], 1.0), 0.0)
    return symmetrize(root), symmetrize(inv), ratio


def trace_sqrt(m):
    """``trace(m^{1/2})`` from the clamped eigenvalues alone (batched)."""
    w = np.linalg.eigvalsh(symmetrize(m))
    return np.sum(np.sqrt(_check_clamp(w)), axis=-1)
