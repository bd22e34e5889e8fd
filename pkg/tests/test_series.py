from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagcast.exceptions import DegenerateSplit, EmptyIntersection, InvalidConfig
from lagcast.series import (
    SplitSpec,
    TimeSeries,
    align,
    cumulative_to_daily,
    daily_to_cumulative,
    label_prefix,
    split,
)

from helpers import series

D0 = date(2020, 1, 1)

counts = st.lists(st.integers(0, 10**7), min_size=1, max_size=60)


def test_time_series_is_read_only():
    s = series([1, 2, 3])
    with pytest.raises(ValueError):
        s.values[0] = 5


def test_empty_series_rejected():
    with pytest.raises(ValueError):
        series([])


def test_dates_and_end_date():
    s = series([1, 2, 3], start=D0)
    assert s.end_date == date(2020, 1, 3)
    assert s.dates == [D0, date(2020, 1, 2), date(2020, 1, 3)]
    assert s.index_of(date(2020, 1, 3)) == 2


@pytest.mark.parametrize(
    "cum, clamp, expected",
    [
        ([5, 7, 7, 10], False, [5, 2, 0, 3]),
        ([5, 7, 6, 10], False, [5, 2, -1, 4]),
        ([5, 7, 6, 10], True, [5, 2, 0, 4]),
    ],
)
def test_cumulative_to_daily(cum, clamp, expected):
    daily = cumulative_to_daily(series(cum), clamp_negative=clamp)
    np.testing.assert_array_equal(daily.values, expected)


@given(counts)
def test_daily_round_trip(values):
    cum = series(np.cumsum(values))
    back = daily_to_cumulative(cumulative_to_daily(cum))
    np.testing.assert_array_equal(back.values, cum.values)


@given(counts)
def test_daily_of_monotone_cumulative_is_non_negative(values):
    daily = cumulative_to_daily(series(np.cumsum(values)))
    assert (daily.values >= 0).all()


def test_align_clips_to_intersection():
    a = series(range(10), start=date(2020, 1, 1))
    b = series(range(11), start=date(2020, 1, 5))
    x, y = align([a, b])
    assert (x.start_date, x.end_date) == (date(2020, 1, 5), date(2020, 1, 10))
    assert len(x) == len(y) == 6
    np.testing.assert_array_equal(x.values, np.arange(4, 10))


def test_align_disjoint_raises():
    a = series(range(3), start=date(2020, 1, 1))
    b = series(range(3), start=date(2020, 2, 1))
    with pytest.raises(EmptyIntersection):
        align([a, b])


@given(
    st.integers(0, 40), st.integers(1, 40), st.integers(0, 40), st.integers(1, 40)
)
def test_align_outputs_share_dates(o1, n1, o2, n2):
    a = series(np.arange(n1), start=D0 + timedelta(days=o1))
    b = series(np.arange(n2), start=D0 + timedelta(days=o2))
    lo, hi = max(o1, o2), min(o1 + n1, o2 + n2) - 1
    if hi < lo:
        with pytest.raises(EmptyIntersection):
            align([a, b])
        return
    x, y = align([a, b])
    assert x.start_date == y.start_date and x.end_date == y.end_date
    assert len(x) == hi - lo + 1


def test_split_by_ratio():
    train, test = split(series(range(10)), SplitSpec.ratio(0.8))
    assert (len(train), len(test)) == (8, 2)
    assert test.start_date == train.end_date + timedelta(days=1)


def test_split_by_boundary():
    s = series(range(363), start=date(2020, 1, 22))
    train, test = split(s, SplitSpec.boundary(date(2020, 11, 7)))
    assert train.end_date == date(2020, 11, 7)
    assert len(train) + len(test) == 363


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.5, 1.5])
def test_ratio_outside_unit_interval(fraction):
    with pytest.raises(InvalidConfig):
        SplitSpec.ratio(fraction)


@pytest.mark.parametrize("last", [date(2019, 12, 1), date(2020, 1, 10)])
def test_degenerate_split(last):
    with pytest.raises(DegenerateSplit):
        split(series(range(10), start=date(2020, 1, 1)), SplitSpec.boundary(last))


@given(st.integers(2, 500), st.floats(0.05, 0.95))
def test_split_partitions_series(n, fraction):
    s = series(np.arange(n))
    k = SplitSpec.ratio(fraction).n_train(s.start_date, n)
    if k < 1 or k >= n:
        with pytest.raises(DegenerateSplit):
            split(s, SplitSpec.ratio(fraction))
        return
    train, test = split(s, SplitSpec.ratio(fraction))
    np.testing.assert_array_equal(np.concatenate([train.values, test.values]), s.values)


@pytest.mark.parametrize("role, prefix", [("deaths", "Yt"), ("confirmed", "Ct"), ("recovered", "Rt")])
def test_label_prefix(role, prefix):
    assert label_prefix(role) == prefix
