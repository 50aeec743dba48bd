"""Command-line driver.

``distclust run`` runs one experiment pipeline end to end and writes
``results.csv``, ``timing.csv``, ``labels_<alg>.csv``, ``clusters_<alg>.svg``
and ``run.json``. ``distclust dist`` evaluates distances and barycenters on
JSON moment files.

Exit codes: 0 success, 2 input error, 3 numerical error.
"""

import argparse
import csv
import io
import json
import logging
import os
import shutil
import statistics
import sys
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from . import fixtures
from .barycenter import barycenter
from .clustering import ENGINES, ClusterConfig, propagate_labels, raw_points, run_engine
from .distances import ed_squared, w2_squared
from .distributions import GAUSSIAN, LOGNORMAL, build_dataset
from .exceptions import InputError, NumericsError, SchemaError
from .ingest import (
    FEATURE_SETS,
    generate_synthetic,
    load_stock_classes,
    load_stocks,
    load_weather,
    stock_truth_labels,
    stock_windows,
)
from .metrics import evaluate
from .plotting import scatter_svg

log = logging.getLogger("distclust")

EXIT_OK, EXIT_INPUT, EXIT_NUMERICS = 0, 2, 3
PIPELINES = ("synth", "weather", "stocks", "custom")
DEFAULT_K = {"synth": 3, "weather": 4, "stocks": 7}
RAW_ENGINES = ("km", "kmd")


@dataclass
class RunSpec:
    pipeline: str
    algorithms: list
    k: int
    seed: int = 0
    restarts: int = 10
    max_iters: int = 300
    features: str = "d3"
    input: str = None
    truth: str = None
    family: str = GAUSSIAN
    out: str = "out"
    bench: bool = False

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise InputError(f"unknown pipeline {self.pipeline!r}")
        if not self.algorithms:
            raise InputError("at least one algorithm is required")
        bad = [a for a in self.algorithms if a not in ENGINES]
        if bad:
            raise InputError(f"unknown algorithms {bad}; choose from {','.join(ENGINES)}")
        if self.k is None or self.k < 1:
            raise InputError("k must be at least 1")

    def config(self):
        return ClusterConfig(k=self.k, max_iters=self.max_iters, seed=self.seed,
                             restarts=self.restarts)


def _load_custom(path, truth_path, family):
    df = pd.read_csv(path)
    if df.columns[0] != "window" or df.shape[1] < 2:
        raise SchemaError(f"{path}: expected header window,<feature>,...")
    order = pd.unique(df["window"])
    groups = [df[df["window"] == w].iloc[:, 1:].to_numpy(dtype=float) for w in order]
    labels = None
    if truth_path:
        t = pd.read_csv(truth_path)
        if list(t.columns[:2]) != ["window", "label"]:
            raise SchemaError(f"{truth_path}: expected header window,label")
        lookup = dict(zip(t["window"], t["label"]))
        missing = [w for w in order if w not in lookup]
        if missing:
            raise SchemaError(f"{truth_path}: no label for windows {missing[:5]}")
        codes = {v: i for i, v in enumerate(sorted({lookup[w] for w in order}, key=str))}
        labels = [codes[lookup[w]] for w in order]
    return build_dataset(groups, family=family, labels_true=labels)


def load_pipeline(spec):
    """Build the dataset for ``spec``; returns ``(dataset, summary dict)``."""
    if spec.pipeline == "synth":
        data = generate_synthetic(spec.seed)
        ds = build_dataset(data.windows, labels_true=data.labels)
        feature_names = ["x0", "x1"]
    elif spec.pipeline == "weather":
        if spec.features not in FEATURE_SETS:
            raise InputError(f"--features must be d3 or d7, got {spec.features!r}")
        path = spec.input or fixtures.WEATHER_FILE
        wins = load_weather(path, spec.features)
        if len(wins) < 2:
            raise InputError(f"{path}: fewer than two complete season windows")
        ds = build_dataset([w.samples for w in wins], labels_true=[w.truth_label for w in wins])
        feature_names = FEATURE_SETS[spec.features]
    elif spec.pipeline == "stocks":
        series = load_stocks(spec.input or fixtures.STOCK_FILE)
        table = load_stock_classes(spec.truth or fixtures.STOCK_CLASS_FILE)
        labels = stock_truth_labels([s.ticker for s in series], table)
        ds = build_dataset(stock_windows(series), family=LOGNORMAL, labels_true=labels)
        feature_names = ["sample", "gross_return"]
    else:
        if not spec.input:
            raise InputError("the custom pipeline needs --input")
        ds = _load_custom(spec.input, spec.truth, spec.family)
        feature_names = [f"x{i}" for i in range(ds.dim)]
    summary = {
        "n_distributions": len(ds),
        "window_length": int(ds.samples.shape[1]),
        "n_features": int(ds.dim),
        "n_samples": int(ds.samples.shape[0] * ds.samples.shape[1]),
        "family": ds.family,
        "has_truth": ds.labels_true is not None,
    }
    return ds, summary, feature_names


def _fmt(x):
    return "" if x is None else f"{x:.10g}"


def _plot_centers(alg, ds, res, pts):
    if alg == "km":
        return res.centers
    if alg == "kmd":
        return pts[res.centers]
    if alg in ("wkm", "ekm"):
        return np.stack([m for m, _ in res.centers])
    return ds.means[res.centers]


def _write_outputs(tmp, spec, ds, summary, feature_names, results):
    rows, timing = [], []
    pts = raw_points(ds)
    truth = None
    if ds.labels_true is not None:
        truth = np.repeat(ds.labels_true, ds.samples.shape[1])
    for alg, (res, seconds) in results.items():
        sample_labels = res.labels if alg in RAW_ENGINES else propagate_labels(ds, res)
        rep = evaluate(sample_labels, truth) if truth is not None else None
        rows.append([alg, _fmt(rep and rep.accuracy), _fmt(rep and rep.nmi), _fmt(rep and rep.ari),
                     str(res.iterations), _fmt(res.objective)])
        timing.append([alg, f"{seconds:.6f}"])
        with open(tmp / f"labels_{alg}.csv", "w", newline="") as fh:
            fh.write("sample_index,cluster\n")
            fh.writelines(f"{i},{c}\n" for i, c in enumerate(sample_labels.tolist()))
        title = f"{alg.upper()} ({spec.pipeline})"
        if rep is not None:
            title += f"  acc={rep.accuracy:.4f}"
        centers = _plot_centers(alg, ds, res, pts)
        if ds.family == LOGNORMAL:
            centers = centers.reshape(len(centers), -1)
        (tmp / f"clusters_{alg}.svg").write_text(
            scatter_svg(pts, sample_labels, centers, title=title, axis_labels=feature_names[:2]))

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "accuracy", "nmi", "ari", "iterations", "objective"])
    w.writerows(rows)
    (tmp / "results.csv").write_text(buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "compute_seconds"])
    w.writerows(timing)
    w.writerow(["preprocessing", f"{summary.pop('_preprocess_seconds'):.6f}"])
    (tmp / "timing.csv").write_text(buf.getvalue())

    echo = asdict(spec)
    echo.pop("out")
    echo["input"] = None if spec.input is None else str(spec.input)
    echo["family"] = summary["family"]
    run = {"spec": echo, "dataset": summary}
    (tmp / "run.json").write_text(json.dumps(run, indent=2, sort_keys=True) + "\n")


def run(spec):
    """Execute ``spec`` and write its artifacts; returns an exit code."""
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".partial-", dir=out))
    try:
        t0 = time.perf_counter()
        ds, summary, feature_names = load_pipeline(spec)
        summary["_preprocess_seconds"] = time.perf_counter() - t0
        cfg = spec.config()
        results = {}
        for alg in spec.algorithms:
            repeats = 3 if spec.bench else 1
            times = []
            for _ in range(repeats):
                t = time.perf_counter()
                res = run_engine(alg, ds, cfg)
                times.append(time.perf_counter() - t)
            results[alg] = (res, statistics.median(times))
            log.info("%s done in %.3fs", alg, results[alg][1])
        _write_outputs(tmp, spec, ds, summary, feature_names, results)
        for f in sorted(tmp.iterdir()):
            os.replace(f, out / f.name)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    return EXIT_OK


# --- dist ------------------------------------------------------------------

def read_moments(path):
    """Parse ``{"mean": [...], "cov": [[...]], "cross": [[...]]?}``."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be an object")
    for key in ("mean", "cov"):
        if key not in doc:
            raise SchemaError(f"{path}: missing key {key!r}")
    try:
        mean = np.atleast_1d(np.asarray(doc["mean"], dtype=float))
        cov = np.atleast_2d(np.asarray(doc["cov"], dtype=float))
        cross = None if doc.get("cross") is None else np.atleast_2d(np.asarray(doc["cross"], dtype=float))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: non-numeric or ragged entries ({exc})") from exc
    if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
        raise SchemaError(f"{path}: cov shape {cov.shape} does not match mean length {mean.size}")
    if cross is not None and cross.shape != cov.shape:
        raise SchemaError(f"{path}: cross shape {cross.shape}, expected {cov.shape}")
    return mean, cov, cross


def _g(x):
    return float(f"{x:.12g}")


def dist_command(args, stdout=None):
    stdout = stdout or sys.stdout
    docs = [read_moments(p) for p in args.files]
    if args.quantity in ("w2", "ed") and len(docs) != 2:
        raise InputError(f"{args.quantity} needs exactly two moment files")
    if args.quantity == "w2":
        value = w2_squared(docs[0][:2], docs[1][:2])
    elif args.quantity == "ed":
        if docs[0][2] is None:
            raise InputError(f"{args.files[0]}: ed needs a 'cross' entry")
        value = ed_squared(docs[0][:2], docs[1][:2], docs[0][2])
    else:
        res = barycenter([d[:2] for d in docs])
        out = {"mean": [_g(v) for v in res.mean],
               "cov": [[_g(v) for v in row] for row in res.cov],
               "iterations": res.iterations}
        stdout.write(json.dumps(out) + "\n")
        return EXIT_OK
    if args.sqrt:
        value = float(np.sqrt(value))
    stdout.write(f"{value:.12g}\n")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="distclust", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a clustering pipeline")
    r.add_argument("--pipeline", choices=PIPELINES, required=True)
    r.add_argument("--algorithms", default=",".join(ENGINES),
                   help="comma-separated subset of " + ",".join(ENGINES))
    r.add_argument("--k", type=int)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--restarts", type=int, default=10)
    r.add_argument("--max-iters", type=int, default=300)
    r.add_argument("--features", choices=sorted(FEATURE_SETS), default="d3")
    r.add_argument("--input")
    r.add_argument("--truth")
    r.add_argument("--family", choices=(GAUSSIAN, LOGNORMAL), default=GAUSSIAN,
                   help="distribution family for the custom pipeline")
    r.add_argument("--out", default="out")
    r.add_argument("--bench", action="store_true", help="report the median of 3 timed repeats")

    d = sub.add_parser("dist", help="distance or barycenter of moment files")
    d.add_argument("quantity", choices=("w2", "ed", "barycenter"))
    d.add_argument("files", nargs="+")
    d.add_argument("--sqrt", action="store_true", help="print the distance instead of its square")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "dist":
            return dist_command(args)
        k = args.k if args.k is not None else DEFAULT_K.get(args.pipeline)
        spec = RunSpec(
            pipeline=args.pipeline,
            algorithms=[a.strip() for a in args.algorithms.split(",") if a.strip()],
            k=k, seed=args.seed, restarts=args.restarts, max_iters=args.max_iters,
            features=args.features, input=args.input, truth=args.truth,
            family=args.family, out=args.out, bench=args.bench,
        )
        return run(spec)
    except (InputError, FileNotFoundError, pd.errors.EmptyDataError) as exc:
        print(f"distclust: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericsError as exc:
        print(f"distclust: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
