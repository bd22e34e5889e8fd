"""Kind-keyed construction, fitting and JSON persistence of the regressors."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from sklearn.base import clone

from ..exceptions import InvalidConfig
from .base import FeatureMatrix, LabelledRegressor
from .forest import RandomForestRegressor
from .knn import KNNRegressor
from .mlp import MLPRegressor
from .svr import SVRRegressor

KINDS = {
    "rf": RandomForestRegressor,
    "svr": SVRRegressor,
    "knn": KNNRegressor,
    "mlp": MLPRegressor,
}
MODEL_FORMAT = "lagcast.regressor"
MODEL_VERSION = 1


def make(kind: str, config: dict | None = None) -> LabelledRegressor:
    """Unfitted regressor of ``kind`` with ``config`` applied over the defaults."""
    try:
        cls = KINDS[kind]
    except KeyError:
        raise InvalidConfig(f"unknown regressor kind {kind!r}; expected one of {sorted(KINDS)}") from None
    est = cls()
    config = dict(config or {})
    unknown = set(config) - set(est.get_params())
    if unknown:
        raise InvalidConfig(f"unknown {kind} settings: {sorted(unknown)}")
    if "hidden_layers" in config:
        config["hidden_layers"] = tuple(int(w) for w in config["hidden_layers"])
    return est.set_params(**config)


def fit(kind: str, config: dict | None, data: FeatureMatrix) -> LabelledRegressor:
    return make(kind, config).fit(data)


def predict(model: LabelledRegressor, rows) -> np.ndarray:
    return model.predict(rows)


def _jsonable(value):
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def to_document(model: LabelledRegressor) -> dict:
    params = {k: _jsonable(v) for k, v in model.get_params().items()}
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "config": params,
        "seed": params.get("seed"),
        "feature_labels": list(model.feature_labels_),
        "state": model.get_state(),
    }


def from_document(doc: dict) -> LabelledRegressor:
    if doc.get("format") != MODEL_FORMAT:
        raise InvalidConfig("not a serialized regressor")
    if doc.get("version") != MODEL_VERSION:
        raise InvalidConfig(f"unsupported regressor document version {doc.get('version')}")
    model = make(doc["kind"], doc["config"])
    return model.set_state(doc["state"], doc["feature_labels"])


def save(model: LabelledRegressor, path) -> None:
    Path(path).write_text(json.dumps(to_document(model)))


def load(path) -> LabelledRegressor:
    return from_document(json.loads(Path(path).read_text()))


def refit_clone(model: LabelledRegressor, data: FeatureMatrix) -> LabelledRegressor:
    return clone(model).fit(data)
