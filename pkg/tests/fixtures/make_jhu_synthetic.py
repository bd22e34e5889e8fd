"""Regenerate the synthetic JHU-format fixture in ``jhu_synthetic/``.

The three files share the upstream layout and date range (22 Jan 2020 to
18 Jan 2021) but hold simulated counts: confirmed cases follow three
epidemic waves with a weekly cycle, recoveries trail confirmed cases by about
two weeks, and deaths follow a distributed-lag model of both. World totals
are split across a handful of regions, one of which has a quoted name.

Run ``python tests/fixtures/make_jhu_synthetic.py`` from the repository root.
"""

from __future__ import annotations

import csv
from datetime import date, timedelta
from pathlib import Path

import numpy as np

FIRST = date(2020, 1, 22)
LAST = date(2021, 1, 18)
OUT = Path(__file__).with_name("jhu_synthetic")

REGIONS = [
    ("", "Afghanistan", 33.93911, 67.709953, 0.08),
    ("", "Brazil", -14.235, -51.9253, 0.22),
    ("Hubei", "China", 30.9756, 112.2707, 0.05),
    ("", "India", 20.593684, 78.96288, 0.25),
    ("Bonaire, Sint Eustatius and Saba", "Netherlands", 12.1784, -68.2385, 0.02),
    ("", "US", 40.0, -100.0, 0.38),
]


def _wave(t, peak, height, width):
    z = (t - peak) / width
    return height / np.cosh(z) ** 2


def simulate(seed: int = 20200122):
    rng = np.random.default_rng(seed)
    n = (LAST - FIRST).days + 1
    t = np.arange(n, dtype=float)
    weekly = 1.0 + 0.12 * np.sin(2.0 * np.pi * t / 7.0)
    base = _wave(t, 100, 85_000, 30) + _wave(t, 205, 260_000, 35) + _wave(t, 352, 720_000, 45) + 400
    confirmed = np.round(base * weekly * rng.lognormal(0.0, 0.05, n))

    recovered = np.zeros(n)
    for i in range(n):
        lo, hi = max(0, i - 14), max(1, i - 9)
        recovered[i] = 0.72 * confirmed[lo:hi].mean() * rng.lognormal(0.0, 0.08)
    recovered = np.round(recovered)

    deaths = np.zeros(n)
    deaths[0] = 17
    for i in range(1, n):
        mean = 0.55 * deaths[i - 1] + 0.0125 * confirmed[i] - 0.004 * confirmed[i - 1] + 0.003 * recovered[i]
        deaths[i] = max(0.0, mean * rng.lognormal(0.0, 0.06))
    deaths = np.round(deaths)
    return rng, {"confirmed": confirmed, "recovered": recovered, "deaths": deaths}


def split_regions(rng, daily):
    shares = np.array([r[4] for r in REGIONS])
    shares = shares / shares.sum()
    out = np.zeros((len(REGIONS), len(daily)), dtype=np.int64)
    for i, total in enumerate(daily.astype(np.int64)):
        out[:, i] = rng.multinomial(total, shares)
    return np.cumsum(out, axis=1)


def write(role, cumulative, dates):
    header = ["Province/State", "Country/Region", "Lat", "Long"] + [
        f"{d.month}/{d.day}/{d.year % 100}" for d in dates
    ]
    path = OUT / f"time_series_covid19_{role}_global.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for (prov, country, lat, lon, _), row in zip(REGIONS, cumulative):
            writer.writerow([prov, country, lat, lon, *row.tolist()])
    return path


def main():
    OUT.mkdir(exist_ok=True)
    rng, series = simulate()
    dates = [FIRST + timedelta(days=i) for i in range((LAST - FIRST).days + 1)]
    for role in ("confirmed", "deaths", "recovered"):
        print(write(role, split_regions(rng, series[role]), dates))


if __name__ == "__main__":
    main()
