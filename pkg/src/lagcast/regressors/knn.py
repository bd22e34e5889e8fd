"""k-nearest-neighbour regression on standardised features."""

from __future__ import annotations

import math

import numpy as np

from ..exceptions import InvalidConfig
from .base import LabelledRegressor, standardize_stats


def default_k(n_train: int) -> int:
    """Square root of the training size, rounded half up."""
    return max(1, int(math.floor(math.sqrt(n_train) + 0.5)))


class KNNRegressor(LabelledRegressor):
    """Unweighted mean of the ``k`` nearest training targets.

    Distance is Euclidean on features standardised with training statistics.
    Equal distances are broken by the lower training-row index.

    Parameters
    ----------
    k : int or None
        Neighbour count; None means ``round(sqrt(n_train))``.
    """

    kind = "knn"
    _state_attrs = ("x_mean_", "x_scale_", "train_X_", "train_y_", "k_")

    def __init__(self, k=None):
        self.k = k

    def fit(self, X, y=None):
        X, y = self._validate_fit(X, y)
        n = len(y)
        k = default_k(n) if self.k is None else int(self.k)
        if not 1 <= k <= n:
            raise InvalidConfig(f"k must lie in [1, {n}], got {k}")
        self.k_ = k
        self.x_mean_, self.x_scale_ = standardize_stats(X)
        self.train_X_ = (X - self.x_mean_) / self.x_scale_
        self.train_y_ = y.copy()
        return self

    def kneighbors(self, X):
        """Indices of the ``k_`` nearest training rows for each query, nearest first."""
        X = self._validate_predict(X)
        Z = (X - self.x_mean_) / self.x_scale_
        d2 = ((Z[:, None, :] - self.train_X_[None, :, :]) ** 2).sum(-1)
        return np.argsort(d2, axis=1, kind="stable")[:, : self.k_]

    def predict(self, X):
        return self.train_y_[self.kneighbors(X)].mean(axis=1)

    def set_state(self, state, feature_labels):
        super().set_state(state, feature_labels)
        self.train_X_ = np.asarray(self.train_X_, dtype=float).reshape(-1, len(feature_labels))
        self.train_y_ = np.asarray(self.train_y_, dtype=float)
        self.x_mean_ = np.asarray(self.x_mean_, dtype=float)
        self.x_scale_ = np.asarray(self.x_scale_, dtype=float)
        self.k_ = int(self.k_)
        return self
