import io
from datetime import date

import numpy as np
import pytest

from helpers import SYNTHETIC_DIR
from lagcast import ingest
from lagcast.exceptions import (
    EmptyInput,
    HttpStatusError,
    MalformedHeader,
    NetworkError,
    RaggedRow,
    UnparseableCount,
    UnparseableDate,
)
from lagcast.ingest import SnapshotManifest, aggregate_global, fetch, parse_jhu_csv

SMALL = (
    "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20\n"
    ",Afghanistan,33.9,67.7,0,1,3\n"
    '"Bonaire, Sint Eustatius and Saba",Netherlands,12.1,-68.2,2,2,5\n'
    ",Canada,,,1,4,4\n"
)


def test_parse_small_file():
    dates, records = parse_jhu_csv(SMALL)
    assert dates == [date(2020, 1, 22), date(2020, 1, 23), date(2020, 1, 24)]
    assert [r.country_region for r in records] == ["Afghanistan", "Netherlands", "Canada"]
    assert records[1].province_state == "Bonaire, Sint Eustatius and Saba"
    assert records[0].province_state is None
    assert records[2].latitude is None
    np.testing.assert_array_equal(records[1].cumulative, [2, 2, 5])


def test_aggregate_sums_regions():
    dates, records = parse_jhu_csv(SMALL)
    total = aggregate_global(records, dates, "confirmed")
    assert total.role == "confirmed"
    np.testing.assert_array_equal(total.values, [3, 7, 12])


def test_byte_order_mark_is_ignored():
    dates, _ = parse_jhu_csv("\ufeff" + SMALL)
    assert len(dates) == 3


@pytest.mark.parametrize(
    "text, error",
    [
        ("", MalformedHeader),
        ("Country,Province,Lat,Long,1/22/20\n", MalformedHeader),
        ("Province/State,Country/Region,Lat,Long,1/22/20,1/23/20\n,X,0,0,1\n", RaggedRow),
        ("Province/State,Country/Region,Lat,Long,22.1.2020\n,X,0,0,1\n", UnparseableDate),
        ("Province/State,Country/Region,Lat,Long,1/22/20\n,X,0,0,many\n", UnparseableCount),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_jhu_csv(io.StringIO(text))


def test_aggregate_requires_consecutive_days():
    dates, records = parse_jhu_csv(
        "Province/State,Country/Region,Lat,Long,1/22/20,1/24/20\n,X,0,0,1,2\n"
    )
    with pytest.raises(MalformedHeader):
        aggregate_global(records, dates)


def test_aggregate_empty():
    with pytest.raises(EmptyInput):
        aggregate_global([], [])


def test_fetch_local_fixture_window():
    manifest = SnapshotManifest.from_directory(
        SYNTHETIC_DIR, date_window=(date(2020, 1, 22), date(2021, 1, 18))
    )
    data = fetch(manifest)
    assert set(data) == {"deaths", "recovered", "confirmed"}
    for role, s in data.items():
        assert s.role == role
        assert len(s) == 363
        assert s.start_date == date(2020, 1, 22)
        assert s.end_date == date(2021, 1, 18)


def test_fetch_clip_counts_columns():
    manifest = SnapshotManifest.from_directory(
        SYNTHETIC_DIR, date_window=(date(2020, 3, 1), date(2020, 3, 31))
    )
    assert all(len(s) == 31 for s in fetch(manifest).values())


def test_load_cumulative_reports_shape():
    path = SYNTHETIC_DIR / ingest.jhu_filename("deaths")
    s, rows, cols = ingest.load_cumulative(path, "deaths")
    assert (rows, cols) == (6, 363)
    assert len(s) == 363


def test_fetch_missing_role_source():
    with pytest.raises(EmptyInput):
        fetch(SnapshotManifest(sources={"deaths": "x.csv"}))


def test_offline_without_cache(tmp_path):
    manifest = SnapshotManifest(cache_dir=tmp_path, offline=True)
    with pytest.raises(NetworkError):
        fetch(manifest)


def test_remote_fetch_writes_cache(tmp_path, monkeypatch):
    payloads = {r: (SYNTHETIC_DIR / ingest.jhu_filename(r)).read_bytes() for r in ingest.ROLES}

    class Response(io.BytesIO):
        def __enter__(self):
            return self

        def __exit__(self, *exc):
            return False

    def fake_urlopen(url, timeout):
        role = next(r for r in payloads if f"_{r}_" in url)
        return Response(payloads[role])

    monkeypatch.setattr(ingest.urllib.request, "urlopen", fake_urlopen)
    monkeypatch.setenv("LAGCAST_CACHE_DIR", str(tmp_path))
    data = fetch(SnapshotManifest())
    cached = sorted(p.name for p in tmp_path.iterdir())
    assert len(cached) == 3 and all(name.endswith(".csv") for name in cached)
    assert len(data["deaths"]) == 363

    # the cached copy now serves offline runs
    offline = fetch(SnapshotManifest(offline=True))
    assert offline["confirmed"] == data["confirmed"]


def test_http_error_maps_to_status(tmp_path, monkeypatch):
    def failing(url, timeout):
        raise ingest.urllib.error.HTTPError(url, 404, "Not Found", None, None)

    monkeypatch.setattr(ingest.urllib.request, "urlopen", failing)
    with pytest.raises(HttpStatusError):
        ingest.download("https://example.invalid/x.csv", tmp_path / "x.csv")


def test_unreachable_host(tmp_path, monkeypatch):
    def failing(url, timeout):
        raise ingest.urllib.error.URLError("no route")

    monkeypatch.setattr(ingest.urllib.request, "urlopen", failing)
    with pytest.raises(NetworkError):
        ingest.download("https://example.invalid/x.csv", tmp_path / "x.csv")


def test_default_cache_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("LAGCAST_CACHE_DIR", str(tmp_path))
    assert ingest.default_cache_dir() == tmp_path
