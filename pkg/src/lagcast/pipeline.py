"""Stages behind the command line: load, fit, compare and forecast.

Every stage takes a resolved run configuration (see :mod:`lagcast.config`)
and recomputes what it needs from the input files, so each command can run
on its own and repeated runs give byte-identical outputs.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ardl import ArdlFit, LagSpec, build_design, fit_ardl, prune_insignificant, select_lags, term_label
from .config import ALL_ROLES, EXOG_ROLES, roles_of, validate
from .evaluation import compare_models
from .exceptions import DegenerateSplit, InvalidConfig
from .forecasting import RoleModel, SystemModel, recursive_forecast
from .ingest import SnapshotManifest, fetch, load_cumulative, parse_iso_date, resolve_source
from .regressors import DEFAULT_HIDDEN, FeatureMatrix, make, search_mlp_architecture, tune_svr
from .series import SplitSpec, TimeSeries, align, cumulative_to_daily

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoleFit:
    role: str
    selected: LagSpec
    spec: LagSpec
    fit: ArdlFit


def manifest_of(cfg: dict) -> SnapshotManifest:
    window = cfg.get("date_window")
    return SnapshotManifest(
        sources=dict(cfg["sources"]),
        date_window=None if window is None else tuple(parse_iso_date(d) for d in window),
        cache_dir=None if cfg.get("cache_dir") is None else Path(cfg["cache_dir"]),
        offline=bool(cfg["offline"]),
    )


def load_daily(cfg: dict) -> dict[str, TimeSeries]:
    """Aligned daily world series for all three roles."""
    cumulative = fetch(manifest_of(cfg), ALL_ROLES)
    daily = [cumulative_to_daily(cumulative[r], cfg["clamp_negative"]) for r in ALL_ROLES]
    return dict(zip(ALL_ROLES, align(daily)))


def split_spec(cfg: dict) -> SplitSpec:
    if cfg.get("split_date"):
        return SplitSpec.boundary(parse_iso_date(cfg["split_date"]))
    return SplitSpec.ratio(cfg["split_ratio"])


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _formats(cfg: dict) -> tuple[bool, bool]:
    return cfg["format"] in ("csv", "both"), cfg["format"] in ("json", "both")


# fetch


def daily_csv(data: dict[str, TimeSeries]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", *ALL_ROLES])
    first = data[ALL_ROLES[0]]
    for i, day in enumerate(first.dates):
        writer.writerow([day.isoformat(), *(repr(float(data[r].values[i])) for r in ALL_ROLES)])
    return buf.getvalue()


def run_fetch(cfg: dict) -> tuple[dict, list[Path]]:
    """Resolve (and download) every source; return per-role (rows, columns)."""
    manifest = manifest_of(cfg)
    counts = {}
    for role in ALL_ROLES:
        path = resolve_source(role, manifest.sources[role], manifest)
        _, rows, cols = load_cumulative(path, role)
        counts[role] = (rows, cols)
    data = load_daily(cfg)
    out = Path(cfg["out"]) / "data"
    written = [_write(out / "daily.csv", daily_csv(data))]
    return counts, written


# fit


def role_spec(cfg: dict, role: str) -> LagSpec:
    """Explicit lag spec of ``role`` from the configuration."""
    entry = cfg["lag_specs"].get(role)
    if entry is None:
        raise KeyError(role)
    exog = entry.get("exog", {})
    unknown = set(exog) - set(EXOG_ROLES[role])
    if unknown:
        raise InvalidConfig(f"{role} model cannot use {sorted(unknown)} as inputs")
    return LagSpec(
        role,
        int(entry["q"]),
        tuple((r, int(exog[r])) for r in EXOG_ROLES[role] if r in exog),
        frozenset(entry.get("removed", ())),
        bool(entry.get("include_intercept", True)),
    )


def _exog(data: dict, role: str) -> dict:
    return {r: data[r] for r in EXOG_ROLES[role]}


def fit_role(cfg: dict, data: dict, role: str) -> RoleFit:
    """Explicit or searched lag spec, then backward elimination at ``alpha``."""
    y, exog = data[role], _exog(data, role)
    if cfg["lag_search"]:
        selected = select_lags(y, exog, role, cfg["max_q"], cfg["max_p"], n_jobs=cfg["n_jobs"])
    else:
        selected = role_spec(cfg, role)
    if cfg["alpha"] is None:
        return RoleFit(role, selected, selected, fit_ardl(y, exog, selected))
    spec, fit = prune_insignificant(y, exog, selected, cfg["alpha"])
    return RoleFit(role, selected, spec, fit)


def fit_document(cfg: dict, data: dict, rf: RoleFit) -> dict:
    series = data[rf.role]
    return {
        "role": rf.role,
        "seed": int(cfg["seed"]),
        "alpha": cfg["alpha"],
        "window": {"start": series.start_date.isoformat(), "end": series.end_date.isoformat()},
        "selected_spec": rf.selected.to_dict(),
        "fit": rf.fit.to_dict(),
    }


def fit_report(rf: RoleFit) -> str:
    return f"{rf.role} model\n\n{rf.fit.summary()}\n"


def run_fit(cfg: dict, data: dict | None = None, fits: dict | None = None):
    data = load_daily(cfg) if data is None else data
    fits = fits or {}
    fits = {r: fits.get(r) or fit_role(cfg, data, r) for r in roles_of(cfg)}
    out = Path(cfg["out"]) / "fit"
    written = []
    for role, rf in fits.items():
        doc = fit_document(cfg, data, rf)
        validate(doc, "fit")
        written.append(_write(out / f"{role}.json", _json(doc)))
        written.append(_write(out / f"{role}.txt", fit_report(rf)))
    return fits, written


# compare


def feature_matrix(data: dict, spec: LagSpec) -> tuple[FeatureMatrix, list]:
    """Lag features of ``spec`` (no intercept column) and the target dates."""
    y = data[spec.response]
    X, target, labels = build_design(y, _exog(data, spec.response), spec)
    if spec.include_intercept:
        X, labels = X[:, 1:], labels[1:]
    dates = y.dates[spec.max_lag :]
    return FeatureMatrix(X, labels, target), dates


def train_test(cfg: dict, data: dict, spec: LagSpec) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Chronological split of the lag features by target date."""
    fm, _ = feature_matrix(data, spec)
    series = data[spec.response]
    n_train = split_spec(cfg).n_train(series.start_date, len(series))
    cut = n_train - spec.max_lag
    if cut < 1 or cut >= len(fm):
        raise DegenerateSplit(f"split leaves {max(cut, 0)} training rows of {len(fm)}")
    index = np.arange(len(fm))
    return fm.rows(index[:cut]), fm.rows(index[cut:])


def model_configs(cfg: dict, role: str, train: FeatureMatrix, test: FeatureMatrix, seed: int) -> dict:
    configs = {kind: dict(v) for kind, v in cfg["models"].items()}
    configs["mlp"].setdefault("hidden_layers", DEFAULT_HIDDEN[role])
    if cfg.get("svr_grid"):
        base = make("svr", configs["svr"])
        tuned = tune_svr(train, cfg["svr_grid"], folds=cfg["cv_folds"] or 10, seed=seed, base=base)
        configs["svr"].update(C=tuned.C, gamma=tuned.gamma)
    if cfg.get("mlp_candidates"):
        base = make("mlp", {**configs["mlp"], "seed": configs["mlp"].get("seed", seed)})
        best = search_mlp_architecture(train, test, cfg["mlp_candidates"], base=base)
        configs["mlp"]["hidden_layers"] = best.hidden_layers
    return configs


def compare_role(cfg: dict, data: dict, rf: RoleFit):
    train, test = train_test(cfg, data, rf.spec)
    configs = model_configs(cfg, rf.role, train, test, int(cfg["seed"]))
    return compare_models(
        train,
        test,
        configs,
        int(cfg["seed"]),
        folds=cfg["cv_folds"],
        scheme=cfg["cv_scheme"],
        n_jobs=cfg["n_jobs"],
        role=rf.role,
        spec=rf.spec.to_dict(),
    )


def run_compare(cfg: dict, data: dict | None = None, fits: dict | None = None):
    data = load_daily(cfg) if data is None else data
    fits = fits or {}
    fits = {r: fits.get(r) or fit_role(cfg, data, r) for r in roles_of(cfg)}
    roles = list(fits)
    if cfg["n_jobs"] > 1 and len(roles) > 1:
        with ThreadPoolExecutor(max_workers=min(cfg["n_jobs"], len(roles))) as pool:
            tables = dict(zip(roles, pool.map(lambda r: compare_role(cfg, data, fits[r]), roles)))
    else:
        tables = {r: compare_role(cfg, data, fits[r]) for r in roles}
    out = Path(cfg["out"]) / "compare"
    want_csv, want_json = _formats(cfg)
    written = []
    for role, table in tables.items():
        if want_csv:
            written.append(_write(out / f"{role}.csv", table.to_csv()))
        if want_json:
            doc = table.to_dict()
            validate(doc, "comparison")
            written.append(_write(out / f"{role}.json", _json(doc)))
    return tables, written


# forecast


def persistence_model(role: str) -> RoleModel:
    spec = LagSpec(role, 1, (), include_intercept=False)
    return RoleModel.from_fit(ArdlFit.from_coefficients(spec, {term_label(role, 1): 1.0}))


def build_system(cfg: dict, data: dict, fits: dict) -> SystemModel:
    backend = cfg["forecast_backend"]
    if backend == "persistence":
        return SystemModel({r: persistence_model(r) for r in ALL_ROLES})
    if backend == "ardl":
        return SystemModel({r: fits[r].fit for r in ALL_ROLES})
    models = {}
    for role in ALL_ROLES:
        fm, _ = feature_matrix(data, fits[role].spec)
        config = dict(cfg["models"].get(backend) or {})
        if backend == "mlp":
            config.setdefault("hidden_layers", DEFAULT_HIDDEN[role])
        est = make(backend, config)
        if "seed" in est.get_params() and "seed" not in config:
            est.set_params(seed=int(cfg["seed"]))
        models[role] = RoleModel(fits[role].spec, est.fit(fm))
    return SystemModel(models)


def run_forecast(cfg: dict, data: dict | None = None, fits: dict | None = None):
    """Forecast the full three-role system and write the requested roles."""
    data = load_daily(cfg) if data is None else data
    fits = fits or {}
    fits = {r: fits.get(r) or fit_role(cfg, data, r) for r in ALL_ROLES}
    system = build_system(cfg, data, fits)
    result = recursive_forecast(system, data, cfg["horizon"], floor_at_zero=cfg["floor_at_zero"])
    result.roles = [r for r in ALL_ROLES if r in roles_of(cfg)]
    out = Path(cfg["out"]) / "forecast"
    want_csv, want_json = _formats(cfg)
    written = []
    if want_csv:
        written.append(_write(out / "forecast.csv", result.to_csv()))
    if want_json:
        doc = {"seed": int(cfg["seed"]), **result.to_dict()}
        validate(doc, "forecast")
        written.append(_write(out / "forecast.json", _json(doc)))
    return result, written


def run_pipeline(cfg: dict) -> dict:
    """All stages on one load of the data; returns every stage's results."""
    counts, written = run_fetch(cfg)
    data = load_daily(cfg)
    fits = {r: fit_role(cfg, data, r) for r in ALL_ROLES}
    _, fit_files = run_fit(cfg, data, fits)
    tables, cmp_files = run_compare(cfg, data, fits)
    result, fc_files = run_forecast(cfg, data, fits)
    return {
        "counts": counts,
        "fits": fits,
        "tables": tables,
        "forecast": result,
        "written": written + fit_files + cmp_files + fc_files,
    }
