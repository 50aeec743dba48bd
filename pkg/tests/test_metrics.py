import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score

from distclust.exceptions import LengthMismatch
from distclust.metrics import (
    EXHAUSTIVE_MAX_K,
    accuracy,
    ari,
    best_alignment,
    contingency,
    evaluate,
    nmi,
)


def test_contingency_counts():
    t = contingency(["a", "a", "b", "c"], [1, 1, 2, 2])
    np.testing.assert_array_equal(t.counts, [[2, 0], [0, 1], [0, 1]])
    assert t.total == 4
    with pytest.raises(LengthMismatch):
        contingency([0, 1], [0])


def test_perfect_relabeled():
    rep = evaluate([2, 2, 0, 0, 1], [0, 0, 1, 1, 2])
    assert rep.accuracy == rep.nmi == rep.ari == 1.0
    assert rep.alignment == {2: 0, 0: 1, 1: 2}


def test_single_cluster_both():
    rep = evaluate([0, 0, 0], [5, 5, 5])
    assert rep.accuracy == 1.0 and rep.nmi == 1.0 and rep.ari == 1.0


def test_known_values():
    pred = [0, 0, 1, 1, 1, 2]
    truth = [0, 0, 0, 1, 1, 1]
    t = contingency(pred, truth)
    assert accuracy(t) == pytest.approx(4 / 6)
    assert nmi(t) == pytest.approx(normalized_mutual_info_score(truth, pred))
    assert ari(t) == pytest.approx(adjusted_rand_score(truth, pred))


def test_alignment_above_exhaustive_limit(rng):
    k = EXHAUSTIVE_MAX_K + 3
    truth = rng.integers(0, k, size=400)
    perm = rng.permutation(k)
    pred = perm[truth]
    pred[:40] = rng.integers(0, k, size=40)
    matched, pairs = best_alignment(contingency(pred, truth))
    assert matched >= 360
    assert len({r for r, _ in pairs}) == len(pairs) == k


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=2, max_size=30))
def test_agrees_with_sklearn(pairs):
    pred, truth = map(list, zip(*pairs))
    t = contingency(pred, truth)
    assert ari(t) == pytest.approx(adjusted_rand_score(truth, pred), abs=1e-12)
    if len(set(pred)) > 1 or len(set(truth)) > 1:
        assert nmi(t) == pytest.approx(normalized_mutual_info_score(truth, pred), abs=1e-12)


def test_brute_force_accuracy(rng):
    for _ in range(50):
        n = int(rng.integers(1, 20))
        pred = rng.integers(0, 4, size=n)
        truth = rng.integers(0, 3, size=n)
        best = 0
        p_cls, t_cls = np.unique(pred), np.unique(truth)
        for perm in itertools.permutations(t_cls.tolist() + [None] * len(p_cls), len(p_cls)):
            mapping = dict(zip(p_cls.tolist(), perm))
            best = max(best, sum(mapping[p] == t for p, t in zip(pred.tolist(), truth.tolist())))
        assert accuracy(contingency(pred, truth)) == pytest.approx(best / n, abs=1e-12)


def test_nmi_independent_splits():
    assert nmi(contingency([0, 0, 1, 1], [0, 1, 0, 1])) == 0.0
