"""Run configuration: defaults, JSON loading, schema validation and overrides."""

from __future__ import annotations

import copy
import json
from importlib import resources
from pathlib import Path

import jsonschema

from .exceptions import InvalidConfig
from .ingest import DEFAULT_URLS, jhu_filename
from .series import CONFIRMED, DEATHS, RECOVERED

ALL_ROLES = (DEATHS, CONFIRMED, RECOVERED)

# exogenous inputs of each response, in design column order
EXOG_ROLES = {
    DEATHS: (CONFIRMED, RECOVERED),
    CONFIRMED: (RECOVERED,),
    RECOVERED: (CONFIRMED,),
}

DEFAULTS = {
    "sources": dict(DEFAULT_URLS),
    "data_dir": None,
    "cache_dir": None,
    "offline": False,
    "date_window": ["2020-01-22", "2021-01-18"],
    "clamp_negative": False,
    "split_ratio": 0.8,
    "split_date": None,
    "lag_search": False,
    "max_q": 4,
    "max_p": 4,
    "lag_specs": {
        DEATHS: {"q": 1, "exog": {CONFIRMED: 3, RECOVERED: 1}, "removed": []},
        CONFIRMED: {"q": 4, "exog": {RECOVERED: 3}, "removed": []},
        RECOVERED: {"q": 3, "exog": {CONFIRMED: 3}, "removed": []},
    },
    "alpha": 0.10,
    "models": {"rf": {}, "svr": {}, "knn": {}, "mlp": {}},
    "svr_grid": None,
    "mlp_candidates": None,
    "cv_scheme": "shuffled",
    "cv_folds": 10,
    "horizon": 15,
    "forecast_backend": "ardl",
    "floor_at_zero": False,
    "seed": 0,
    "out": "lagcast-out",
    "format": "both",
    "role": "all",
    "n_jobs": 1,
}


def load_schema(name: str) -> dict:
    text = resources.files("lagcast.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(document: dict, schema_name: str) -> None:
    """Raise :class:`InvalidConfig` unless ``document`` matches the named schema."""
    try:
        jsonschema.validate(document, load_schema(schema_name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidConfig(f"{schema_name} invalid at {where}: {exc.message}") from None


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key in ("models", "lag_specs") and isinstance(value, dict):
            merged = dict(out.get(key) or {})
            merged.update(value)
            out[key] = merged
        else:
            out[key] = value
    return out


def read_config_file(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InvalidConfig(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"config file {path} is not valid JSON: {exc}") from None
    validate(doc, "config")
    return doc


def resolve(file_config: dict | None = None, flags: dict | None = None) -> dict:
    """Defaults, then the config file, then command-line flags; validated."""
    cfg = _merge(DEFAULTS, file_config or {})
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    if "split_ratio" in flags:
        cfg["split_date"] = None
    cfg = _merge(cfg, flags)
    if cfg.get("data_dir"):
        cfg["sources"] = {r: str(Path(cfg["data_dir"]) / jhu_filename(r)) for r in ALL_ROLES}
    validate(cfg, "config")
    return cfg


def roles_of(cfg: dict) -> list[str]:
    return list(ALL_ROLES) if cfg["role"] == "all" else [cfg["role"]]
