import csv
import json

import numpy as np
import pytest

from helpers import SYNTHETIC_DIR, run_config
from lagcast import cli, config
from lagcast.exceptions import InvalidConfig

FAST = {
    "models": {
        "rf": {"n_trees": 30},
        "mlp": {"max_iter": 200, "learning_rate": 0.001},
    },
    "cv_folds": 3,
}


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(FAST))
    return path


def run(args, tmp_path, capsys, config_path=None):
    argv = list(args) + ["--data-dir", str(SYNTHETIC_DIR), "--offline", "--out", str(tmp_path / "out")]
    if config_path is not None:
        argv += ["--config", str(config_path)]
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------- configuration


def test_defaults_are_schema_valid():
    cfg = config.resolve()
    assert cfg["horizon"] == 15 and cfg["alpha"] == 0.10 and cfg["seed"] == 0
    assert cfg["lag_specs"]["deaths"] == {"q": 1, "exog": {"confirmed": 3, "recovered": 1}, "removed": []}


def test_precedence_flags_over_file_over_defaults():
    cfg = config.resolve({"horizon": 7, "seed": 3, "split_date": "2020-11-07"}, {"seed": 9})
    assert (cfg["horizon"], cfg["seed"]) == (7, 9)
    assert cfg["split_date"] == "2020-11-07"
    assert config.resolve({"split_date": "2020-11-07"}, {"split_ratio": 0.7})["split_date"] is None


def test_partial_model_overrides_merge():
    cfg = config.resolve({"models": {"rf": {"n_trees": 10}}})
    assert cfg["models"]["rf"] == {"n_trees": 10}
    assert cfg["models"]["svr"] == {}


@pytest.mark.parametrize(
    "doc",
    [
        {"horizon": 0},
        {"format": "xml"},
        {"seed": -1},
        {"split_ratio": 1.0},
        {"role": "active"},
        {"colour": "blue"},
        {"lag_specs": {"deaths": {"exog": {}}}},
        {"models": {"gbm": {}}},
        {"date_window": ["2020-01-22"]},
    ],
)
def test_invalid_configs(doc):
    with pytest.raises(InvalidConfig):
        config.resolve(doc)


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidConfig):
        config.read_config_file(bad)
    with pytest.raises(InvalidConfig):
        config.read_config_file(tmp_path / "missing.json")


def test_data_dir_sets_local_sources():
    cfg = run_config()
    assert cfg["sources"]["deaths"].endswith("time_series_covid19_deaths_global.csv")


# ---------------------------------------------------------------- exit codes


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["fit", "--role", "everyone"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        cli.main([])
    assert info.value.code == 1


def test_zero_horizon_exits_one(tmp_path, capsys):
    code, _, err = run(["forecast", "--horizon", "0"], tmp_path, capsys)
    assert code == 1 and "horizon" in err


def test_missing_cache_exits_two(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LAGCAST_CACHE_DIR", str(tmp_path / "empty"))
    code = cli.main(["fetch", "--offline", "--out", str(tmp_path / "out")])
    assert code == 2
    assert "NetworkError" in capsys.readouterr().err


def test_data_shorter_than_lags_exits_two(tmp_path, capsys):
    path = tmp_path / "short.json"
    path.write_text(json.dumps({"date_window": ["2020-03-01", "2020-03-03"]}))
    code, _, err = run(["fit", "--role", "deaths"], tmp_path, capsys, path)
    assert code == 2 and "TooShort" in err


# ---------------------------------------------------------------- commands


def test_fetch_reports_counts(tmp_path, capsys):
    code, out, _ = run(["fetch"], tmp_path, capsys)
    assert code == 0
    for role in ("deaths", "confirmed", "recovered"):
        assert f"{role}: 6 rows, 363 date columns" in out
    rows = read_csv(tmp_path / "out" / "data" / "daily.csv")
    assert len(rows) == 363 and rows[0]["date"] == "2020-01-22"


def test_fit_writes_reports(tmp_path, capsys):
    code, _, _ = run(["fit", "--role", "deaths", "--alpha", "0.1"], tmp_path, capsys)
    assert code == 0
    doc = json.loads((tmp_path / "out" / "fit" / "deaths.json").read_text())
    config.validate(doc, "fit")
    labels = [c["label"] for c in doc["fit"]["coefficients"]]
    assert labels[0] == "(Intercept)" and "Yt.1" in labels
    assert doc["seed"] == 0 and doc["window"] == {"start": "2020-01-22", "end": "2021-01-18"}
    assert "Adjusted R-squared" in (tmp_path / "out" / "fit" / "deaths.txt").read_text()
    assert not (tmp_path / "out" / "fit" / "confirmed.json").exists()


def test_intercept_only_spec(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"lag_specs": {"deaths": {"q": 0}}}))
    code, _, _ = run(["fit", "--role", "deaths"], tmp_path, capsys, path)
    assert code == 0
    doc = json.loads((tmp_path / "out" / "fit" / "deaths.json").read_text())
    assert [c["label"] for c in doc["fit"]["coefficients"]] == ["(Intercept)"]


def test_lag_search_option(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"lag_search": True, "max_q": 2, "max_p": 2}))
    code, _, _ = run(["fit", "--role", "recovered"], tmp_path, capsys, path)
    assert code == 0
    doc = json.loads((tmp_path / "out" / "fit" / "recovered.json").read_text())
    assert doc["selected_spec"]["q"] <= 2


def test_compare_is_byte_identical(tmp_path, capsys, fast_config):
    args = ["compare", "--role", "deaths", "--split-date", "2020-11-07", "--seed", "42"]
    assert run(args, tmp_path / "a", capsys, fast_config)[0] == 0
    assert run(args + ["--jobs", "3"], tmp_path / "b", capsys, fast_config)[0] == 0
    for name in ("deaths.csv", "deaths.json"):
        a = (tmp_path / "a" / "out" / "compare" / name).read_bytes()
        b = (tmp_path / "b" / "out" / "compare" / name).read_bytes()
        assert a == b
    rows = read_csv(tmp_path / "a" / "out" / "compare" / "deaths.csv")
    assert len(rows) == 8
    doc = json.loads((tmp_path / "a" / "out" / "compare" / "deaths.json").read_text())
    assert doc["seed"] == 42
    config.validate(doc, "comparison")


def test_diverging_model_is_flagged(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({**FAST, "models": {"rf": {"n_trees": 20}, "mlp": {"learning_rate": 1.0}}}))
    code, _, err = run(["compare", "--role", "deaths", "--format", "csv"], tmp_path, capsys, path)
    assert code == 0
    assert "warning: deaths/mlp failed" in err
    rows = read_csv(tmp_path / "out" / "compare" / "deaths.csv")
    status = {(r["model"], r["split"]): r["status"] for r in rows}
    assert status[("ANN", "test")] == "failed"
    assert status[("RF", "test")] == "ok" and status[("KNN", "train")] == "ok"
    assert not (tmp_path / "out" / "compare" / "deaths.json").exists()


def test_forecast_dates_and_rows(tmp_path, capsys):
    code, _, _ = run(["forecast", "--horizon", "15"], tmp_path, capsys)
    assert code == 0
    rows = read_csv(tmp_path / "out" / "forecast" / "forecast.csv")
    assert len(rows) == 45
    for role in ("deaths", "confirmed", "recovered"):
        dates = [r["date"] for r in rows if r["role"] == role]
        assert dates[0] == "2021-01-19" and dates[-1] == "2021-02-02" and len(dates) == 15
    doc = json.loads((tmp_path / "out" / "forecast" / "forecast.json").read_text())
    config.validate(doc, "forecast")
    assert doc["backend"] == "ardl" and doc["seed"] == 0


def test_persistence_backend_is_flat(tmp_path, capsys):
    code, _, _ = run(["forecast", "--backend", "persistence", "--role", "deaths"], tmp_path, capsys)
    assert code == 0
    rows = read_csv(tmp_path / "out" / "forecast" / "forecast.csv")
    assert {r["role"] for r in rows} == {"deaths"}
    assert len({r["forecast"] for r in rows}) == 1


def test_regressor_backend(tmp_path, capsys):
    code, _, _ = run(["forecast", "--backend", "knn", "--horizon", "5", "--format", "json"], tmp_path, capsys)
    assert code == 0
    doc = json.loads((tmp_path / "out" / "forecast" / "forecast.json").read_text())
    assert doc["backend"] == "knn" and len(doc["forecasts"]) == 15
    assert np.all(np.isfinite([f["forecast"] for f in doc["forecasts"]]))


def test_outputs_stay_under_out_dir(tmp_path, capsys, fast_config):
    before = set(SYNTHETIC_DIR.iterdir())
    code, out, _ = run(["pipeline", "--split-date", "2020-11-07", "--role", "recovered"], tmp_path, capsys, fast_config)
    assert code == 0
    assert set(SYNTHETIC_DIR.iterdir()) == before
    written = [line for line in out.splitlines() if "/out/" in line]
    assert written and all(line.startswith(str(tmp_path / "out")) for line in written)
