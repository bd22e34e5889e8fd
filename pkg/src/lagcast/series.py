"""Daily count series, cumulative/daily transforms, alignment and splitting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Sequence

import numpy as np

from .exceptions import DegenerateSplit, EmptyIntersection, InvalidConfig

DEATHS = "deaths"
RECOVERED = "recovered"
CONFIRMED = "confirmed"
ROLES = (DEATHS, RECOVERED, CONFIRMED)

# Term-label prefixes used in regression tables (Yt.1, Ct.t, Rt.2, ...).
_PREFIX = {DEATHS: "Yt", CONFIRMED: "Ct", RECOVERED: "Rt"}


def label_prefix(role: str) -> str:
    """Prefix used for the lag terms of ``role``; other roles use their own name."""
    return _PREFIX.get(role, role)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Gap-free daily series starting at ``start_date``.

    Values are floats so the same type carries counts, predictions and
    residuals. The array is read-only.
    """

    role: str
    start_date: date
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.size == 0:
            raise ValueError("TimeSeries must be non-empty")

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.role == other.role
            and self.start_date == other.start_date
            and np.array_equal(self.values, other.values)
        )

    @property
    def end_date(self) -> date:
        return self.start_date + timedelta(days=len(self) - 1)

    @property
    def dates(self) -> list[date]:
        return [self.start_date + timedelta(days=i) for i in range(len(self))]

    def date_at(self, index: int) -> date:
        return self.start_date + timedelta(days=index)

    def index_of(self, day: date) -> int:
        return (day - self.start_date).days

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(self.role, self.start_date, values)

    def slice(self, start: int, stop: int | None = None) -> "TimeSeries":
        stop = len(self) if stop is None else stop
        return TimeSeries(self.role, self.date_at(start), self.values[start:stop])

    def clip(self, first: date | None = None, last: date | None = None) -> "TimeSeries":
        """Restrict to ``[first, last]`` (inclusive); bounds outside the range are ignored."""
        lo = 0 if first is None else max(0, self.index_of(first))
        hi = len(self) if last is None else min(len(self), self.index_of(last) + 1)
        if hi <= lo:
            raise EmptyIntersection(f"{self.role}: no observations in [{first}, {last}]")
        return self.slice(lo, hi)


def cumulative_to_daily(cum: TimeSeries, clamp_negative: bool = False) -> TimeSeries:
    """First differences, keeping the first observation as-is.

    Negative increments (upstream corrections) are kept unless
    ``clamp_negative`` is set, in which case they become 0.
    """
    daily = np.diff(cum.values, prepend=0.0)
    if clamp_negative:
        daily = np.maximum(daily, 0.0)
    return cum.with_values(daily)


def daily_to_cumulative(daily: TimeSeries) -> TimeSeries:
    return daily.with_values(np.cumsum(daily.values))


def align(series: Sequence[TimeSeries]) -> list[TimeSeries]:
    """Truncate every series to the common date range, preserving order."""
    if not series:
        return []
    first = max(s.start_date for s in series)
    last = min(s.end_date for s in series)
    if last < first:
        raise EmptyIntersection(f"date ranges do not overlap ({first} > {last})")
    return [s.slice(s.index_of(first), s.index_of(last) + 1) for s in series]


@dataclass(frozen=True)
class SplitSpec:
    """Chronological split, either by ratio (floor(n * fraction) training
    points) or by the last training date."""

    train_fraction: float | None = 0.8
    last_train_date: date | None = None

    def __post_init__(self):
        if self.last_train_date is None:
            if self.train_fraction is None or not 0.0 < self.train_fraction < 1.0:
                raise InvalidConfig(f"train_fraction must lie in (0, 1), got {self.train_fraction}")

    @classmethod
    def ratio(cls, fraction: float = 0.8) -> "SplitSpec":
        return cls(train_fraction=fraction)

    @classmethod
    def boundary(cls, last_train_date: date) -> "SplitSpec":
        return cls(train_fraction=None, last_train_date=last_train_date)

    def n_train(self, start_date: date, n: int) -> int:
        if self.last_train_date is not None:
            return (self.last_train_date - start_date).days + 1
        return int(math.floor(n * self.train_fraction))


def split(s: TimeSeries, spec: SplitSpec) -> tuple[TimeSeries, TimeSeries]:
    n_train = spec.n_train(s.start_date, len(s))
    if n_train < 1 or n_train >= len(s):
        raise DegenerateSplit(
            f"split leaves {max(n_train, 0)} training and {len(s) - max(n_train, 0)} test points"
        )
    return s.slice(0, n_train), s.slice(n_train)
