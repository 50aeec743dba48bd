"""Data pipelines: synthetic unbalanced clusters, weather seasons, stock prices."""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd

from .exceptions import (
    InsufficientDays,
    NonPositivePrice,
    SchemaError,
    ShapeMismatch,
    TooFewRows,
    UnknownTicker,
)

log = logging.getLogger(__name__)

# --- synthetic -------------------------------------------------------------

SYNTH_GROUP_SIZES = (2000, 500, 500)
SYNTH_MEANS = np.array([[0.0, -2.0], [-8.0, -1.0], [8.0, -1.0]])
SYNTH_SCALES = np.array([[1.0, 4.0], [1.0, 2.0], [1.0, 2.0]])
SYNTH_WINDOW = 20


class SyntheticData(NamedTuple):
    points: np.ndarray        # (3000, 2)
    point_labels: np.ndarray  # (3000,)
    windows: np.ndarray       # (150, 20, 2)
    labels: np.ndarray        # (150,)


def generate_synthetic(seed=0):
    """Three unbalanced 2-D Gaussian groups of 2000/500/500 points.

    Windows are consecutive runs of 20 points inside one group, giving
    100 + 25 + 25 windows.
    """
    rng = np.random.default_rng(seed)
    parts, labels = [], []
    for g, size in enumerate(SYNTH_GROUP_SIZES):
        z = rng.standard_normal((size, 2))
        parts.append(z * SYNTH_SCALES[g] + SYNTH_MEANS[g])
        labels.append(np.full(size, g))
    points = np.concatenate(parts)
    point_labels = np.concatenate(labels)
    windows = points.reshape(-1, SYNTH_WINDOW, 2)
    return SyntheticData(points, point_labels, windows, point_labels[::SYNTH_WINDOW].copy())


# --- weather ---------------------------------------------------------------

WEATHER_COLUMNS = ["station", "date", "tmean_c", "tmax_c", "tmin_c",
                   "vapor_kpa", "rhmax", "rhmin", "precip_mm"]
FEATURE_SETS = {
    "d3": ["tmax_c", "precip_mm", "vapor_kpa"],
    "d7": ["tmean_c", "tmax_c", "tmin_c", "vapor_kpa", "rhmax", "rhmin", "precip_mm"],
}
SEASONS = ("Spring", "Summer", "Fall", "Winter")
SEASON_MONTHS = {0: (3, 4, 5), 1: (6, 7, 8), 2: (9, 10, 11), 3: (12, 1, 2)}
DAYS_PER_MONTH = 28
DAYS_PER_SEASON = 3 * DAYS_PER_MONTH


@dataclass(frozen=True)
class SeasonWindow:
    station: str
    year: int
    season: str
    samples: np.ndarray
    truth_label: int


def _season_of(month):
    month = np.asarray(month)
    return np.select([month <= 2, month <= 5, month <= 8, month <= 11], [3, 0, 1, 2], default=3)


def load_weather(path, feature_set="d3"):
    """Read a weather CSV and cut it into 84-day season windows.

    For every (station, season-year, season) the first 28 complete rows of
    each month are kept. Winter joins December of year ``y`` with January
    and February of ``y + 1`` and is labeled ``y``. A season with a short
    month is skipped with a warning.

    Returns
    -------
    list of SeasonWindow
        Sorted by station, year and season.
    """
    if feature_set not in FEATURE_SETS:
        raise SchemaError(f"unknown feature set {feature_set!r}; use d3 or d7")
    try:
        df = pd.read_csv(path, dtype={"station": str})
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    missing = [c for c in WEATHER_COLUMNS if c not in df.columns]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")
    feats = FEATURE_SETS[feature_set]
    try:
        df["date"] = pd.to_datetime(df["date"], format="%Y-%m-%d")
        for c in feats:
            df[c] = pd.to_numeric(df[c])
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    for c in ("rhmax", "rhmin"):
        if c in feats and ((df[c] < 0) | (df[c] > 1)).any():
            raise SchemaError(f"{path}: {c} must be a fraction in [0, 1]")

    df = df.dropna(subset=feats).sort_values(["station", "date"], kind="mergesort")
    month = df["date"].dt.month.to_numpy()
    df["season"] = _season_of(month)
    df["season_year"] = df["date"].dt.year.to_numpy() - (month <= 2)
    df["month"] = month

    windows = []
    for (station, year, season), grp in df.groupby(["station", "season_year", "season"], sort=True):
        blocks = []
        for m in SEASON_MONTHS[season]:
            rows = grp[grp["month"] == m]
            if len(rows) < DAYS_PER_MONTH:
                err = InsufficientDays(station, int(year) + (m <= 2), m, len(rows))
                log.warning("skipping %s %s %d: %s", station, SEASONS[season], year, err)
                blocks = None
                break
            blocks.append(rows[feats].to_numpy(dtype=float)[:DAYS_PER_MONTH])
        if blocks is None:
            continue
        windows.append(SeasonWindow(
            station=str(station), year=int(year), season=SEASONS[season],
            samples=np.concatenate(blocks), truth_label=int(season),
        ))
    return windows


# --- stocks ----------------------------------------------------------------

STOCK_CLASSES = ("LR/LV", "LR/MV1", "LR/MV2", "MR/LV", "MR/MV", "HR/MV", "HR/HV")

# 2018-19 return/volatility classes of 77 Nasdaq-100 members
STOCK_TABLE = {
    "LR/LV": ["AEP", "AMGN", "BKNG", "CHTR", "CMCSA", "CPT", "CSCO", "CSX", "CTSH",
              "EBAY", "EXC", "GILD", "GOOG", "GOOGL", "HON", "MAR", "MDLZ", "PAYX",
              "PCAR", "PEP", "TMUS", "WBA", "XEL"],
    "LR/MV1": ["KHC"],
    "LR/MV2": ["ADI", "AMAT", "ATVI", "AVGO", "BIIB", "DLTR", "EA", "META", "INTC",
               "MCHP", "MNST", "NVDA", "NXPI", "REGN", "SWKS", "TXN"],
    "MR/LV": ["AAPL", "ADP", "ANSS", "CPRT", "CTAS", "FISV", "IDXX", "INTU", "MSFT",
              "ODFL", "ORLY", "ROST", "SBUX", "SNPS", "VRSK", "VRSN"],
    "MR/MV": ["ADBE", "ADSK", "ALGN", "AMZN", "CDNS", "FAST", "FTNT", "ILMN", "ISRG",
              "KLAC", "LRCX", "MU", "NFLX", "PYPL", "QCOM", "TSLA", "VRTX"],
    "HR/MV": ["AMD", "DXCM", "MTCH"],
    "HR/HV": ["ENPH"],
}
DEFAULT_STOCK_CLASSES = {t: cls for cls, ts in STOCK_TABLE.items() for t in ts}


@dataclass(frozen=True)
class StockSeries:
    ticker: str
    dates: np.ndarray
    closes: np.ndarray


def load_stocks(path):
    """Read ``ticker,date,adj_close`` rows into one date-sorted series per ticker.

    Tickers keep their order of first appearance in the file.
    """
    try:
        df = pd.read_csv(path, dtype={"ticker": str})
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    missing = [c for c in ("ticker", "date", "adj_close") if c not in df.columns]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")
    try:
        df["date"] = pd.to_datetime(df["date"], format="%Y-%m-%d")
        df["adj_close"] = pd.to_numeric(df["adj_close"])
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if df["adj_close"].isna().any():
        raise SchemaError(f"{path}: empty adj_close values")
    bad = df[~(df["adj_close"] > 0)]
    if len(bad):
        row = bad.iloc[0]
        raise NonPositivePrice(f"{row['ticker']} {row['date'].date()}: price {row['adj_close']}")

    out = []
    for ticker in pd.unique(df["ticker"]):
        rows = df[df["ticker"] == ticker].sort_values("date", kind="mergesort")
        if len(rows) < 3:
            raise TooFewRows(f"{ticker}: {len(rows)} rows, need at least 3")
        dates = rows["date"].to_numpy()
        if np.any(dates[1:] <= dates[:-1]):
            raise SchemaError(f"{ticker}: duplicate dates")
        out.append(StockSeries(ticker=str(ticker), dates=dates,
                               closes=rows["adj_close"].to_numpy(dtype=float)))
    return out


def stock_windows(series):
    """Stack closes into an ``(N, m, 1)`` array; all series must share their dates."""
    if not series:
        raise ShapeMismatch("no stock series")
    ref = series[0].dates
    for s in series[1:]:
        if len(s.dates) != len(ref) or np.any(s.dates != ref):
            raise ShapeMismatch(f"{s.ticker}: trading dates differ from {series[0].ticker}")
    return np.stack([s.closes for s in series])[:, :, None]


def load_stock_classes(path):
    """Read a ``ticker,class`` file into a dict."""
    df = pd.read_csv(path, dtype=str)
    if list(df.columns[:2]) != ["ticker", "class"]:
        raise SchemaError(f"{path}: expected header ticker,class")
    unknown = sorted(set(df["class"]) - set(STOCK_CLASSES))
    if unknown:
        raise SchemaError(f"{path}: unknown classes {unknown}")
    return dict(zip(df["ticker"], df["class"]))


def stock_truth_labels(tickers, table=None):
    """Class index (order of :data:`STOCK_CLASSES`) for each ticker."""
    table = DEFAULT_STOCK_CLASSES if table is None else table
    out = []
    for t in tickers:
        if t not in table:
            raise UnknownTicker(t)
        out.append(STOCK_CLASSES.index(table[t]))
    return np.asarray(out, dtype=int)
