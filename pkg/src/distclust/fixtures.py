"""Seeded stand-ins for the weather and stock datasets.

The real station records and price histories are not redistributable, so
the package ships schema-identical files generated here. Regenerate with::

    python -m distclust.fixtures <output-dir>
"""

import sys
from pathlib import Path

import numpy as np
import pandas as pd

from .ingest import STOCK_CLASSES, STOCK_TABLE

DATA_DIR = Path(__file__).with_name("data")
WEATHER_FILE = DATA_DIR / "weather_fixture.csv.gz"
STOCK_FILE = DATA_DIR / "stocks_fixture.csv.gz"
STOCK_CLASS_FILE = DATA_DIR / "stock_classes.csv"

STATIONS = ("Avondale", "Ault", "Dove Creek", "Fort Collins", "Kirk")
STATION_OFFSET_C = (3.0, -1.0, -4.0, 1.0, -2.0)
FIRST_YEAR = 2000
N_YEARS = 21

# mean temperature (deg C) as a function of the position u in [0, 1) in the season
_SEASON_CURVES = (
    lambda u: 4.0 + 16.0 * u,                        # spring warms
    lambda u: 21.0 + 4.0 * np.sin(np.pi * u),        # summer peaks
    lambda u: 20.0 - 16.0 * u,                       # fall cools
    lambda u: -1.0 - 4.0 * np.sin(np.pi * u),        # winter dips
)
_SEASON_START = {3: 3, 4: 3, 5: 3, 6: 6, 7: 6, 8: 6, 9: 9, 10: 9, 11: 9, 12: 12, 1: 12, 2: 12}
_SEASON_INDEX = {3: 0, 6: 1, 9: 2, 12: 3}


def _season_position(dates):
    """Season index and fractional position inside the season for each date."""
    month = dates.month.to_numpy()
    start_month = np.array([_SEASON_START[m] for m in month])
    start_year = dates.year.to_numpy() - (month <= 2)
    starts = pd.to_datetime({"year": start_year, "month": start_month, "day": 1})
    elapsed = (dates - pd.DatetimeIndex(starts)).days.to_numpy()
    season = np.array([_SEASON_INDEX[m] for m in start_month])
    return season, elapsed / 91.0


def make_weather_fixture(seed=2024):
    """Daily records for 5 stations, March 2000 through February 2021.

    Temperature follows a season-specific within-season curve plus a
    regional daily anomaly shared by all stations, station and year offsets,
    local noise and occasional gross outliers. Spring and fall have matching
    marginal ranges but opposite trends.
    """
    rng = np.random.default_rng(seed)
    dates = pd.date_range(f"{FIRST_YEAR}-03-01", f"{FIRST_YEAR + N_YEARS}-02-28", freq="D")
    season, u = _season_position(dates)
    n_days = len(dates)

    # regional anomaly, AR(1) over days, shared across stations
    shocks = rng.standard_normal(n_days)
    anomaly = np.empty(n_days)
    anomaly[0] = shocks[0]
    for t in range(1, n_days):
        anomaly[t] = 0.6 * anomaly[t - 1] + 0.8 * shocks[t]
    anomaly *= 2.0
    curve = np.choose(season, [f(u) for f in _SEASON_CURVES])
    year_offset = rng.normal(0.0, 1.0, size=N_YEARS + 1)
    season_year = dates.year.to_numpy() - (dates.month.to_numpy() <= 2) - FIRST_YEAR

    frames = []
    for name, offset in zip(STATIONS, STATION_OFFSET_C):
        tmean = curve + anomaly + offset + year_offset[season_year] + rng.normal(0, 2.0, n_days)
        outlier = rng.random(n_days) < 0.04
        tmean = tmean + outlier * rng.normal(0, 12.0, n_days)
        spread = 7.0 + rng.normal(0, 1.5, n_days)
        tmax = tmean + spread
        tmin = tmean - spread
        vapor = np.clip(0.45 + 0.035 * (tmean - offset) + rng.normal(0, 0.15, n_days), 0.05, None)
        rh_mid = np.clip(0.55 - 0.004 * tmean + rng.normal(0, 0.08, n_days), 0.1, 0.9)
        rhmax = np.clip(rh_mid + 0.2 + rng.normal(0, 0.04, n_days), 0.0, 1.0)
        rhmin = np.clip(rh_mid - 0.2 + rng.normal(0, 0.04, n_days), 0.0, 1.0)
        wet = rng.random(n_days) < 0.25
        precip = wet * rng.gamma(1.2, 4.0, n_days)
        frame = pd.DataFrame({
            "station": name,
            "date": dates.strftime("%Y-%m-%d"),
            "tmean_c": tmean.round(2),
            "tmax_c": tmax.round(2),
            "tmin_c": tmin.round(2),
            "vapor_kpa": vapor.round(3),
            "rhmax": rhmax.round(3),
            "rhmin": rhmin.round(3),
            "precip_mm": precip.round(2),
        })
        # blank a few readings past day 28 so the loader's drop rule is exercised
        late = np.flatnonzero(dates.day.to_numpy() > 28)
        blank = rng.choice(late, size=len(late) // 10, replace=False)
        cols = rng.choice(["tmean_c", "tmax_c", "precip_mm", "vapor_kpa", "rhmin"], size=len(blank))
        for i, c in zip(blank, cols):
            frame.at[i, c] = np.nan
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


# daily log-return drift and volatility per class
STOCK_CLASS_PARAMS = {
    "LR/LV": (0.0002, 0.012),
    "LR/MV1": (-0.0008, 0.020),
    "LR/MV2": (0.0003, 0.022),
    "MR/LV": (0.0010, 0.013),
    "MR/MV": (0.0011, 0.021),
    "HR/MV": (0.0022, 0.028),
    "HR/HV": (0.0035, 0.045),
}
STOCK_DAYS = 504
SECTOR_LOADING = 0.75


def make_stock_fixture(seed=2019):
    """Geometric-Brownian adjusted closes for 77 tickers over 504 trading days.

    Each class shares a common daily factor, so same-class log-returns are
    correlated with loading :data:`SECTOR_LOADING`.

    Returns
    -------
    (prices, classes) : (DataFrame, DataFrame)
    """
    rng = np.random.default_rng(seed)
    dates = pd.bdate_range("2018-01-02", periods=STOCK_DAYS).strftime("%Y-%m-%d")
    factors = {c: rng.standard_normal(STOCK_DAYS - 1) for c in STOCK_CLASSES}
    rows, classes = [], []
    for cls in STOCK_CLASSES:
        drift, vol = STOCK_CLASS_PARAMS[cls]
        for ticker in STOCK_TABLE[cls]:
            eps = rng.standard_normal(STOCK_DAYS - 1)
            shock = SECTOR_LOADING * factors[cls] + np.sqrt(1 - SECTOR_LOADING ** 2) * eps
            r = drift + vol * shock
            p0 = rng.uniform(20.0, 400.0)
            closes = p0 * np.exp(np.concatenate([[0.0], np.cumsum(r)]))
            rows.append(pd.DataFrame({"ticker": ticker, "date": dates, "adj_close": closes.round(4)}))
            classes.append((ticker, cls))
    prices = pd.concat(rows, ignore_index=True)
    return prices, pd.DataFrame(classes, columns=["ticker", "class"])


def write_fixtures(out_dir=DATA_DIR):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    make_weather_fixture().to_csv(out_dir / WEATHER_FILE.name, index=False)
    prices, classes = make_stock_fixture()
    prices.to_csv(out_dir / STOCK_FILE.name, index=False)
    classes.to_csv(out_dir / STOCK_CLASS_FILE.name, index=False)


if __name__ == "__main__":
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else DATA_DIR)
