"""Reader for the JHU CSSE global time-series CSV files.

The files have one row per region and one column per day::

    Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,...

Values are cumulative counts. :func:`aggregate_global` sums all regions into
a single world series.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .exceptions import (
    EmptyInput,
    HttpStatusError,
    MalformedHeader,
    NetworkError,
    RaggedRow,
    UnparseableCount,
    UnparseableDate,
)
from .series import CONFIRMED, DEATHS, RECOVERED, ROLES, TimeSeries

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("Province/State", "Country/Region", "Lat", "Long")

JHU_BASE_URL = (
    "https://raw.githubusercontent.com/CSSEGISandData/COVID-19/master/"
    "csse_covid_19_data/csse_covid_19_time_series"
)


def jhu_filename(role: str) -> str:
    return f"time_series_covid19_{role}_global.csv"


DEFAULT_URLS = {role: f"{JHU_BASE_URL}/{jhu_filename(role)}" for role in ROLES}


@dataclass
class RegionRecord:
    province_state: str | None
    country_region: str
    latitude: float | None
    longitude: float | None
    cumulative: np.ndarray = field(repr=False)


def _parse_date(text: str, column: int) -> date:
    try:
        month, day, year = (int(part) for part in text.strip().split("/"))
        if year < 100:
            year += 2000
        return date(year, month, day)
    except ValueError as exc:
        raise UnparseableDate(f"column {column}: cannot parse date {text!r}") from exc


def _optional_float(text: str) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        return float(text)
    except ValueError:
        return None


def parse_jhu_csv(stream: TextIO | str) -> tuple[list[date], list[RegionRecord]]:
    """Parse one JHU global time-series file.

    Parameters
    ----------
    stream : file-like or str
        CSV text. A ``str`` is treated as the file contents.

    Returns
    -------
    dates : list of date
        The date columns of the header, in file order.
    records : list of RegionRecord
        One record per data row.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedHeader("empty file") from None
    if header:
        header[0] = header[0].lstrip("\ufeff")
    if tuple(h.strip() for h in header[:4]) != REQUIRED_COLUMNS:
        raise MalformedHeader(f"expected leading columns {REQUIRED_COLUMNS}, got {header[:4]}")
    dates = [_parse_date(text, i + 4) for i, text in enumerate(header[4:])]

    records = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise RaggedRow(f"line {line_no}: {len(row)} fields, header has {len(header)}")
        counts = np.empty(len(dates))
        for j, cell in enumerate(row[4:]):
            try:
                counts[j] = float(cell)
            except ValueError:
                raise UnparseableCount(
                    f"line {line_no}, column {j + 5}: cannot parse count {cell!r}"
                ) from None
        records.append(
            RegionRecord(
                province_state=row[0] or None,
                country_region=row[1],
                latitude=_optional_float(row[2]),
                longitude=_optional_float(row[3]),
                cumulative=counts,
            )
        )
    return dates, records


def aggregate_global(records: Iterable[RegionRecord], dates: list[date], role: str = "other") -> TimeSeries:
    """Element-wise sum of all regional cumulative series."""
    records = list(records)
    if not records or not dates:
        raise EmptyInput("no records to aggregate")
    for prev, cur in zip(dates, dates[1:]):
        if (cur - prev).days != 1:
            raise MalformedHeader(f"date columns are not consecutive days ({prev} -> {cur})")
    total = np.sum([r.cumulative for r in records], axis=0)
    return TimeSeries(role, dates[0], total)


@dataclass(frozen=True)
class SnapshotManifest:
    """Where to read each role from.

    ``sources`` maps a role to a local path or an ``http(s)://`` URL.
    ``date_window`` optionally clips every series to ``(first, last)``.
    """

    sources: dict = field(default_factory=lambda: dict(DEFAULT_URLS))
    date_window: tuple[date, date] | None = None
    cache_dir: Path | None = None
    offline: bool = False
    timeout: float = 60.0

    @classmethod
    def from_directory(cls, directory, **kwargs) -> "SnapshotManifest":
        directory = Path(directory)
        return cls(sources={role: str(directory / jhu_filename(role)) for role in ROLES}, **kwargs)


def default_cache_dir() -> Path:
    env = os.environ.get("LAGCAST_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "lagcast"


def _is_url(source: str) -> bool:
    return str(source).startswith(("http://", "https://"))


def _cached_path(cache_dir: Path, role: str, day: date) -> Path:
    return cache_dir / f"{role}_{day.isoformat()}.csv"


def latest_cached(cache_dir: Path, role: str) -> Path | None:
    hits = sorted(cache_dir.glob(f"{role}_*.csv"))
    return hits[-1] if hits else None


def download(url: str, dest: Path, timeout: float = 60.0) -> Path:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as response:
            payload = response.read()
    except urllib.error.HTTPError as exc:
        raise HttpStatusError(url, exc.code) from exc
    except (urllib.error.URLError, OSError) as exc:
        raise NetworkError(f"cannot reach {url}: {exc}") from exc
    dest.parent.mkdir(parents=True, exist_ok=True)
    tmp = dest.with_suffix(".part")
    tmp.write_bytes(payload)
    tmp.replace(dest)
    return dest


def resolve_source(role: str, source: str, manifest: SnapshotManifest) -> Path:
    """Local path for ``source``, downloading into the cache when it is a URL."""
    if not _is_url(source):
        return Path(source)
    cache_dir = manifest.cache_dir or default_cache_dir()
    if manifest.offline:
        hit = latest_cached(cache_dir, role)
        if hit is None:
            raise NetworkError(f"offline mode and no cached {role} file under {cache_dir}")
        return hit
    dest = _cached_path(cache_dir, role, date.today())
    logger.info("fetching %s -> %s", source, dest)
    return download(source, dest, timeout=manifest.timeout)


def load_cumulative(path, role: str) -> tuple[TimeSeries, int, int]:
    """Parse and aggregate one file; also return (rows, date columns)."""
    with open(path, newline="", encoding="utf-8") as fh:
        dates, records = parse_jhu_csv(fh)
    return aggregate_global(records, dates, role), len(records), len(dates)


def fetch(manifest: SnapshotManifest, roles=(DEATHS, RECOVERED, CONFIRMED)) -> dict[str, TimeSeries]:
    """Cumulative world series for each role, clipped to the manifest window.

    The role files are fetched and parsed concurrently.
    """
    missing = [r for r in roles if r not in manifest.sources]
    if missing:
        raise EmptyInput(f"no source configured for {missing}")

    def load(role):
        path = resolve_source(role, manifest.sources[role], manifest)
        series, _, _ = load_cumulative(path, role)
        if manifest.date_window is not None:
            series = series.clip(*manifest.date_window)
        return role, series

    with ThreadPoolExecutor(max_workers=len(roles)) as pool:
        return dict(pool.map(load, roles))


def parse_iso_date(text: str) -> date:
    return datetime.strptime(text, "%Y-%m-%d").date()
