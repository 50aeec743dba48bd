"""External clustering scores: Accuracy, NMI and ARI against ground truth."""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import LengthMismatch

#: exhaustive permutation search is used up to this many clusters
EXHAUSTIVE_MAX_K = 8


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    pred_classes: np.ndarray
    true_classes: np.ndarray

    @property
    def row_sums(self):
        return self.counts.sum(axis=1)

    @property
    def col_sums(self):
        return self.counts.sum(axis=0)

    @property
    def total(self):
        return int(self.counts.sum())


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    nmi: float
    ari: float
    alignment: dict

    def as_dict(self):
        return {"accuracy": self.accuracy, "nmi": self.nmi, "ari": self.ari}


def contingency(pred, truth):
    """Count table ``n_ij`` of items in predicted cluster i and true cluster j.

    Labels may be arbitrary hashable values; rows and columns follow the
    sorted unique labels.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise LengthMismatch(f"{pred.shape[0]} predicted vs {truth.shape[0]} true labels")
    p_cls, p_idx = np.unique(pred, return_inverse=True)
    t_cls, t_idx = np.unique(truth, return_inverse=True)
    counts = np.zeros((len(p_cls), len(t_cls)), dtype=np.int64)
    np.add.at(counts, (p_idx, t_idx), 1)
    return ContingencyTable(counts=counts, pred_classes=p_cls, true_classes=t_cls)


def _as_counts(tbl):
    return np.asarray(tbl.counts if isinstance(tbl, ContingencyTable) else tbl, dtype=np.int64)


def best_alignment(tbl):
    """One-to-one map from predicted rows to true columns maximizing matches.

    Returns ``(matched, pairs)`` with ``pairs`` a list of ``(row, col)``.
    """
    n = _as_counts(tbl)
    rows, cols = n.shape
    if rows == 0 or cols == 0:
        return 0, []
    if max(rows, cols) <= EXHAUSTIVE_MAX_K:
        best, best_pairs = -1, []
        if rows <= cols:
            for perm in itertools.permutations(range(cols), rows):
                s = sum(int(n[i, perm[i]]) for i in range(rows))
                if s > best:
                    best, best_pairs = s, list(zip(range(rows), perm))
        else:
            for perm in itertools.permutations(range(rows), cols):
                s = sum(int(n[perm[j], j]) for j in range(cols))
                if s > best:
                    best, best_pairs = s, sorted(zip(perm, range(cols)))
        return best, best_pairs
    r, c = linear_sum_assignment(-n)
    return int(n[r, c].sum()), list(zip(r.tolist(), c.tolist()))


def accuracy(tbl):
    """Fraction of items on the best one-to-one cluster alignment."""
    n = _as_counts(tbl)
    total = n.sum()
    if total == 0:
        return 0.0
    matched, _ = best_alignment(n)
    return matched / total


def _entropy(counts, total):
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log2(p)))


def nmi(tbl):
    """Normalized mutual information ``2 I / (H(C*) + H(C))`` in bits.

    Two single-cluster partitions score 1.
    """
    n = _as_counts(tbl).astype(float)
    total = n.sum()
    a = n.sum(axis=1)
    b = n.sum(axis=0)
    h_true = _entropy(b, total)
    h_pred = _entropy(a, total)
    if h_true + h_pred == 0.0:
        return 1.0
    # H(C*|C) = sum_i a_i/N * H(row i)
    cond = 0.0
    for i in range(n.shape[0]):
        if a[i] > 0:
            cond += a[i] / total * _entropy(n[i], a[i])
    mi = h_true - cond
    return float(min(max(2.0 * mi / (h_true + h_pred), 0.0), 1.0))


def _comb2(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1.0) / 2.0


def ari(tbl):
    """Adjusted Rand index from pair counts.

    Returns 1 when the chance-corrected denominator and numerator both vanish.
    """
    n = _as_counts(tbl)
    total = n.sum()
    sum_ij = _comb2(n).sum()
    sum_a = _comb2(n.sum(axis=1)).sum()
    sum_b = _comb2(n.sum(axis=0)).sum()
    pairs = _comb2(total)
    expected = sum_a * sum_b / pairs if pairs > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    num = sum_ij - expected
    den = max_index - expected
    if den == 0.0:
        return 1.0 if num == 0.0 else 0.0
    return float(num / den)


def evaluate(pred, truth):
    """Accuracy, NMI and ARI of ``pred`` against ``truth``."""
    tbl = contingency(pred, truth)
    matched, pairs = best_alignment(tbl)
    alignment = {tbl.pred_classes[i].item(): tbl.true_classes[j].item() for i, j in pairs}
    total = tbl.total
    return EvalReport(
        accuracy=matched / total if total else 0.0,
        nmi=nmi(tbl),
        ari=ari(tbl),
        alignment=alignment,
    )
