"""Shared plumbing for the four regressors: labelled inputs and validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import InvalidConfig, LabelMismatch, NonFiniteInput


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Named lag features with an optional aligned target."""

    X: np.ndarray = field(repr=False)
    labels: tuple
    y: np.ndarray | None = field(default=None, repr=False)
    allow_constant: bool = True

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be 2-D")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "labels", tuple(str(lbl) for lbl in self.labels))
        if len(self.labels) != X.shape[1]:
            raise LabelMismatch(f"{len(self.labels)} labels for {X.shape[1]} columns")
        if self.y is not None:
            y = np.asarray(self.y, dtype=float).reshape(-1)
            if len(y) != len(X):
                raise ValueError("target length differs from row count")
            object.__setattr__(self, "y", y)
        if not self.allow_constant and len(X) > 0:
            const = [lbl for lbl, col in zip(self.labels, X.T) if np.ptp(col) == 0]
            if const:
                raise InvalidConfig(f"constant feature columns: {const}")

    def __len__(self):
        return len(self.X)

    def rows(self, index) -> "FeatureMatrix":
        index = np.asarray(index)
        return FeatureMatrix(self.X[index], self.labels, None if self.y is None else self.y[index])

    def without_target(self) -> "FeatureMatrix":
        return FeatureMatrix(self.X, self.labels)


def _extract(X) -> tuple[np.ndarray, list[str] | None]:
    if isinstance(X, FeatureMatrix):
        return X.X, list(X.labels)
    columns = getattr(X, "columns", None)
    if columns is not None:
        return np.asarray(X, dtype=float), [str(c) for c in columns]
    return np.asarray(X, dtype=float), None


def check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteInput("input contains NaN or infinite values")


class LabelledRegressor(RegressorMixin, BaseEstimator):
    """Base for regressors that remember their feature labels.

    ``fit`` accepts a :class:`FeatureMatrix` (target taken from it), a
    DataFrame-like object with ``columns``, or a plain array. ``predict``
    re-orders labelled input to the training order and rejects unknown
    or missing labels.
    """

    kind = ""

    def _validate_fit(self, X, y=None):
        if isinstance(X, FeatureMatrix) and y is None:
            y = X.y
        if y is None:
            raise ValueError("a target is required for fitting")
        arr, labels = _extract(X)
        y = np.asarray(y, dtype=float).reshape(-1)
        if arr.ndim != 2 or len(arr) != len(y):
            raise ValueError(f"X of shape {arr.shape} does not match target of length {len(y)}")
        if len(arr) < 2:
            raise InvalidConfig("at least two training rows are required")
        check_finite(arr, y)
        self.feature_labels_ = labels or [f"x{i}" for i in range(arr.shape[1])]
        self.n_features_in_ = arr.shape[1]
        return arr, y

    def _validate_predict(self, X) -> np.ndarray:
        check_is_fitted(self, "feature_labels_")
        arr, labels = _extract(X)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if labels is not None:
            if sorted(labels) != sorted(self.feature_labels_) or len(set(labels)) != len(labels):
                raise LabelMismatch(f"expected features {self.feature_labels_}, got {labels}")
            arr = arr[:, [labels.index(lbl) for lbl in self.feature_labels_]]
        elif arr.shape[1] != self.n_features_in_:
            raise LabelMismatch(f"expected {self.n_features_in_} features, got {arr.shape[1]}")
        check_finite(arr)
        return arr

    # serialization hooks; subclasses list their fitted array attributes
    _state_attrs: Sequence[str] = ()

    def get_state(self) -> dict:
        check_is_fitted(self, "feature_labels_")
        state = {}
        for name in self._state_attrs:
            value = getattr(self, name)
            state[name] = value.tolist() if isinstance(value, np.ndarray) else value
        return state

    def set_state(self, state: dict, feature_labels) -> "LabelledRegressor":
        for name in self._state_attrs:
            value = state[name]
            setattr(self, name, np.asarray(value) if isinstance(value, list) else value)
        self.feature_labels_ = list(feature_labels)
        self.n_features_in_ = len(self.feature_labels_)
        return self


def standardize_stats(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return mean, scale
