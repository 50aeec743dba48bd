"""Acceptance criteria 1-10, one test each.

Every test records a single ``criterion N: PASS|FAIL`` line, printed
immediately and again in the pytest terminal summary.
"""

import itertools
import math
import time

import numpy as np
import pandas as pd
import pytest
from scipy.stats import norm

from distclust.barycenter import barycenter
from distclust.cli import RunSpec, load_pipeline, main
from distclust.clustering import ClusterConfig, propagate_labels, run_engine
from distclust.distances import ed_squared, optimal_coupling_cov, w2_squared
from distclust.distributions import lognormal_moments
from distclust.ingest import SYNTH_MEANS
from distclust.metrics import accuracy, ari, contingency, evaluate, nmi
from distclust.psd import psd_sqrt
from conftest import ACCEPTANCE_LINES, random_spd

pytestmark = pytest.mark.slow


def verdict(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


# --- shared synthetic run --------------------------------------------------

@pytest.fixture(scope="module")
def synth_run():
    t0 = time.perf_counter()
    ds, _, _ = load_pipeline(RunSpec(pipeline="synth", algorithms=["km"], k=3, seed=0))
    cfg = ClusterConfig(k=3, seed=0, restarts=10)
    truth = np.repeat(ds.labels_true, ds.samples.shape[1])
    out = {}
    for name in ("km", "kmd", "wkm", "ekm", "wkmd", "ekmd"):
        res = run_engine(name, ds, cfg)
        labels = res.labels if name in ("km", "kmd") else propagate_labels(ds, res)
        out[name] = (res, evaluate(labels, truth))
    return ds, out, time.perf_counter() - t0


def test_criterion_1_synthetic_benchmark(synth_run):
    _, out, seconds = synth_run
    scores = {k: (r.accuracy, r.nmi, r.ari) for k, (_, r) in out.items()}
    dist_ok = all(scores[k] == (1.0, 1.0, 1.0) for k in ("wkm", "ekm", "wkmd", "ekmd"))
    raw_ok = all(0.5 < scores[k][0] < 0.95 for k in ("km", "kmd"))
    detail = ", ".join(f"{k} acc={v[0]:.4f}" for k, v in scores.items()) + f", {seconds:.1f}s"
    verdict(1, dist_ok and raw_ok and seconds < 30, detail)


def test_criterion_2_wkm_ekm_centers(synth_run):
    _, out, _ = synth_run
    wkm, ekm = out["wkm"][0], out["ekm"][0]
    same = np.array_equal(wkm.labels, ekm.labels)
    w_means = np.stack([m for m, _ in wkm.centers])
    order = np.argsort(w_means[:, 0])
    truth = SYNTH_MEANS[np.argsort(SYNTH_MEANS[:, 0])]
    mean_err = float(np.abs(w_means[order] - truth).max())
    agree = max(
        max(np.abs(mw - me).max(), np.abs(cw - ce).max())
        for (mw, cw), (me, ce) in zip(wkm.centers, ekm.centers)
    )
    ok = same and mean_err <= 0.15 and agree <= 1e-6
    verdict(2, ok, f"identical partitions={same}, max mean error={mean_err:.4f}, "
                   f"WKM/EKM center gap={agree:.1e}")


# --- distance oracles ------------------------------------------------------

def _joint_sample_moments(rng, n, m=40):
    """Empirical means, covariances and cross-covariance of a joint (X, Y) sample."""
    a = rng.normal(size=(2 * n, 2 * n))
    z = rng.normal(size=(m, 2 * n)) @ a.T + rng.normal(0, 3, size=2 * n)
    mean = z.mean(axis=0)
    cov = np.cov(z, rowvar=False)
    return mean[:n], mean[n:], cov[:n, :n], cov[n:, n:], cov[:n, n:]


def test_criterion_3_ed_dominates_w2():
    rng = np.random.default_rng(3)
    worst_gap, worst_eq = np.inf, 0.0
    for i in range(1000):
        n = 1 + i % 5
        mx, my, sx, sy, sxy = _joint_sample_moments(rng, n)
        a, b = (mx, sx), (my, sy)
        w2 = w2_squared(a, b)
        worst_gap = min(worst_gap, ed_squared(a, b, sxy) - w2)
        worst_eq = max(worst_eq, abs(ed_squared(a, b, optimal_coupling_cov(a, b)) - w2))
    verdict(3, worst_gap >= -1e-8 and worst_eq <= 1e-8,
            f"min(ED-W2)={worst_gap:.3e}, max|ED(opt)-W2|={worst_eq:.1e} over 1000 pairs")


def test_criterion_4_metric_axioms():
    rng = np.random.default_rng(4)
    neg = asym = viol = 0.0
    for i in range(500):
        n = 1 + i % 4
        a = rng.normal(size=(3 * n, 3 * n))
        z = rng.normal(size=(30, 3 * n)) @ a.T
        mean = z.mean(axis=0)
        cov = np.cov(z, rowvar=False)
        blk = [slice(k * n, (k + 1) * n) for k in range(3)]
        mom = [(mean[s], cov[s, s]) for s in blk]

        def ed(p, q):
            return math.sqrt(ed_squared(mom[p], mom[q], cov[blk[p], blk[q]]))

        d = {(p, q): ed(p, q) for p in range(3) for q in range(3)}
        neg = min(neg, min(d.values()))
        asym = max(asym, max(abs(d[p, q] - d[q, p]) for p, q in d))
        viol = max(viol, max(d[p, r] - d[p, q] - d[q, r]
                             for p, q, r in itertools.permutations(range(3))))

        g = [(rng.normal(size=n), random_spd(rng, n, floor=0.01)) for _ in range(3)]
        w = {(p, q): math.sqrt(w2_squared(g[p], g[q])) for p in range(3) for q in range(3)}
        neg = min(neg, min(w.values()))
        asym = max(asym, max(abs(w[p, q] - w[q, p]) for p, q in w))
        viol = max(viol, max(w[p, r] - w[p, q] - w[q, r]
                             for p, q, r in itertools.permutations(range(3))))
    verdict(4, neg >= 0 and asym <= 1e-10 and viol <= 1e-8,
            f"min distance={neg:.1e}, max asymmetry={asym:.1e}, max triangle excess={viol:.1e}")


def test_criterion_5_w2_transport_oracle():
    rng = np.random.default_rng(5)
    worst_exact = worst_mc = 0.0
    u = (np.arange(100_000) + 0.5) / 100_000
    q = norm.ppf(rng.permutation(u))
    for _ in range(200):
        ma, mb = rng.normal(0, 3, size=2)
        sa, sb = rng.uniform(0.1, 4, size=2)
        w = math.sqrt(w2_squared(([ma], [[sa * sa]]), ([mb], [[sb * sb]])))
        exact = math.hypot(ma - mb, sa - sb)
        worst_exact = max(worst_exact, abs(w - exact))
        # comonotone coupling: both samples are quantiles of one uniform draw
        x, y = ma + sa * q, mb + sb * q
        mc = math.sqrt(np.mean((x - y) ** 2))
        worst_mc = max(worst_mc, abs(mc - w) / w)
    verdict(5, worst_exact <= 1e-10 and worst_mc <= 0.02,
            f"max analytic gap={worst_exact:.1e}, max Monte-Carlo rel. gap={worst_mc:.2%}")


def test_criterion_6_barycenter_fixed_point():
    rng = np.random.default_rng(6)
    err_1d = err_nd = 0.0
    max_iters = 0
    for _ in range(100):
        k = int(rng.integers(1, 11))
        sig = rng.uniform(0.1, 5.0, size=k)
        res = barycenter([([0.0], [[s * s]]) for s in sig])
        err_1d = max(err_1d, abs(math.sqrt(res.cov[0, 0]) - sig.mean()))
        max_iters = max(max_iters, res.iterations)
    for _ in range(50):
        d = int(rng.integers(2, 6))
        qm, _ = np.linalg.qr(rng.normal(size=(d, d)))
        covs = [qm @ np.diag(rng.uniform(0.05, 5, d)) @ qm.T for _ in range(int(rng.integers(2, 8)))]
        res = barycenter([(np.zeros(d), c) for c in covs])
        root = np.mean([psd_sqrt(c) for c in covs], axis=0)
        err_nd = max(err_nd, float(np.abs(res.cov - root @ root).max()))
    verdict(6, err_1d <= 1e-8 and max_iters <= 100 and err_nd <= 1e-8,
            f"1-D error={err_1d:.1e} in <= {max_iters} iterations, commuting error={err_nd:.1e}")


# --- metrics oracles -------------------------------------------------------

def _brute_accuracy(pred, truth):
    p_cls, t_cls = sorted(set(pred)), sorted(set(truth))
    best = 0
    pad = t_cls + [None] * len(p_cls)
    for perm in itertools.permutations(pad, len(p_cls)):
        m = dict(zip(p_cls, perm))
        best = max(best, sum(m[p] == t for p, t in zip(pred, truth)))
    return best / len(pred)


def _brute_nmi(pred, truth):
    n = len(pred)

    def h(lab):
        return -sum(c / n * math.log2(c / n) for c in map(lab.count, set(lab)))

    mi = 0.0
    for p in set(pred):
        for t in set(truth):
            nij = sum(1 for a, b in zip(pred, truth) if a == p and b == t)
            if nij:
                mi += nij / n * math.log2(nij * n / (pred.count(p) * truth.count(t)))
    hp, ht = h(pred), h(truth)
    return 1.0 if hp + ht == 0 else 2 * mi / (hp + ht)


def _brute_ari(pred, truth):
    pairs = list(itertools.combinations(range(len(pred)), 2))
    same_p = [pred[i] == pred[j] for i, j in pairs]
    same_t = [truth[i] == truth[j] for i, j in pairs]
    a = sum(x and y for x, y in zip(same_p, same_t))
    np_, nt = sum(same_p), sum(same_t)
    total = len(pairs)
    expected = np_ * nt / total if total else 0.0
    den = 0.5 * (np_ + nt) - expected
    num = a - expected
    if den == 0:
        return 1.0 if num == 0 else 0.0
    return num / den


def test_criterion_7_metric_oracles():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 51))
        pred = rng.integers(0, int(rng.integers(1, 6)), size=n).tolist()
        truth = rng.integers(0, int(rng.integers(1, 6)), size=n).tolist()
        t = contingency(pred, truth)
        worst = max(worst,
                    abs(accuracy(t) - _brute_accuracy(pred, truth)),
                    abs(nmi(t) - _brute_nmi(pred, truth)),
                    abs(ari(t) - _brute_ari(pred, truth)))
    verdict(7, worst <= 1e-12, f"max deviation from brute force={worst:.1e} over 1000 pairs")


def test_criterion_8_lognormal_moments():
    rng = np.random.default_rng(8)
    n = 2
    b = rng.uniform(0.05, 0.3, size=(2 * n, 2 * n))
    joint = b @ b.T + 0.01 * np.eye(2 * n)
    theta = rng.normal(0, 0.2, size=2 * n)
    z = np.exp(rng.multivariate_normal(theta, joint, size=1_000_000))
    x, y = z[:, :n], z[:, n:]
    mom = lognormal_moments(theta[:n], joint[:n, :n], theta[n:], joint[n:, n:], joint[:n, n:])
    mc_mu = np.concatenate([x.mean(axis=0), y.mean(axis=0)])
    mc_cross = (x - x.mean(axis=0)).T @ (y - y.mean(axis=0)) / (len(z) - 1)
    err_mu = float(np.max(np.abs(mc_mu / np.concatenate([mom.mean_x, mom.mean_y]) - 1)))
    err_cross = float(np.max(np.abs(mc_cross / mom.cross_cov - 1)))
    verdict(8, err_mu <= 0.015 and err_cross <= 0.015,
            f"max rel. error mean={err_mu:.3%}, cross-covariance={err_cross:.3%}")


# --- fixtures through the CLI ----------------------------------------------

PIPELINE_RUNS = {
    "weather_d3": ["--pipeline", "weather", "--features", "d3"],
    "weather_d7": ["--pipeline", "weather", "--features", "d7"],
    "stocks": ["--pipeline", "stocks"],
    "synth": ["--pipeline", "synth"],
}


@pytest.fixture(scope="module")
def cli_runs(tmp_path_factory):
    out = {}
    for name, args in PIPELINE_RUNS.items():
        d = tmp_path_factory.mktemp(name)
        assert main(["run", *args, "--seed", "0", "--out", str(d)]) == 0
        out[name] = d
    return out


def test_criterion_9_fixture_ordering(cli_runs):
    notes, ok = [], True
    for name in ("weather_d3", "weather_d7", "stocks"):
        res = pd.read_csv(cli_runs[name] / "results.csv").set_index("algorithm")["accuracy"]
        for raw, w2, ed in (("km", "wkm", "ekm"), ("kmd", "wkmd", "ekmd")):
            good = res[raw] < res[w2] <= res[ed]
            ok &= bool(good)
            notes.append(f"{name} {raw}/{w2}/{ed}={res[raw]:.3f}/{res[w2]:.3f}/{res[ed]:.3f}")
    for name in ("weather_d3", "weather_d7"):
        t = pd.read_csv(cli_runs[name] / "timing.csv").set_index("algorithm")["compute_seconds"]
        faster = t["wkm"] < t["km"] and t["ekm"] < t["km"] and t["wkmd"] < t["kmd"] and t["ekmd"] < t["kmd"]
        ok &= bool(faster)
        notes.append(f"{name} seconds km={t['km']:.2f} wkm={t['wkm']:.2f} ekm={t['ekm']:.2f} "
                     f"kmd={t['kmd']:.2f} wkmd={t['wkmd']:.2f} ekmd={t['ekmd']:.2f}")
    verdict(9, ok, "; ".join(notes))


def test_criterion_10_determinism(cli_runs, tmp_path):
    same = {}
    for name, args in PIPELINE_RUNS.items():
        d = tmp_path / name
        assert main(["run", *args, "--seed", "0", "--out", str(d)]) == 0
        same[name] = (d / "results.csv").read_bytes() == (cli_runs[name] / "results.csv").read_bytes()
    verdict(10, all(same.values()), ", ".join(f"{k} identical={v}" for k, v in same.items()))
