"""Estimator wrappers so the ARDL pieces compose with scikit-learn."""

from __future__ import annotations

from typing import Mapping

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .design import INTERCEPT, LagSpec, build_design
from .ols import ols_fit
from .selection import prune_insignificant, select_lags


class OLSRegressor(RegressorMixin, BaseEstimator):
    """Least squares with inference; ``result_`` holds the coefficient table."""

    def __init__(self, fit_intercept=True):
        self.fit_intercept = fit_intercept

    def fit(self, X, y):
        labels = list(getattr(X, "columns", [])) or None
        X, y = check_X_y(X, y, y_numeric=True)
        labels = [str(c) for c in labels] if labels else [f"x{i}" for i in range(X.shape[1])]
        if self.fit_intercept:
            X = np.column_stack([np.ones(len(X)), X])
            labels = [INTERCEPT, *labels]
        self.result_ = ols_fit(X, y, labels)
        self.n_features_in_ = X.shape[1] - int(self.fit_intercept)
        return self

    @property
    def coef_(self):
        check_is_fitted(self, "result_")
        return self.result_.params[int(self.fit_intercept):]

    @property
    def intercept_(self):
        check_is_fitted(self, "result_")
        return self.result_.params[0] if self.fit_intercept else 0.0

    def predict(self, X):
        check_is_fitted(self, "result_")
        X = check_array(X)
        return X @ self.coef_ + self.intercept_


class LagFeatures(TransformerMixin, BaseEstimator):
    """Turn a mapping of aligned series into the lagged feature matrix of ``spec``.

    The intercept column is left out; downstream regressors add their own.
    """

    def __init__(self, spec: LagSpec):
        self.spec = spec

    def fit(self, data: Mapping, y=None):
        self.feature_names_out_ = np.array(self.spec.feature_labels(), dtype=object)
        return self

    def transform(self, data: Mapping):
        X, _, _ = build_design(data[self.spec.response], data, self.spec)
        return X[:, 1:] if self.spec.include_intercept else X

    def target(self, data: Mapping) -> np.ndarray:
        _, y, _ = build_design(data[self.spec.response], data, self.spec)
        return y

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return self.feature_names_out_


class ARDLModel(BaseEstimator):
    """Lag selection, backward elimination and OLS in one estimator.

    ``fit`` takes a mapping of role to aligned series. When ``q`` is None the
    orders are searched up to ``max_q``/``max_p``; otherwise the explicit
    orders (and ``removed``) are used. Terms with p-value above ``alpha`` are
    then eliminated unless ``alpha`` is None.
    """

    def __init__(
        self,
        response="deaths",
        exog_roles=(),
        q=None,
        exog_orders=None,
        removed=(),
        include_intercept=True,
        max_q=4,
        max_p=4,
        alpha=0.10,
        n_jobs=1,
    ):
        self.response = response
        self.exog_roles = exog_roles
        self.q = q
        self.exog_orders = exog_orders
        self.removed = removed
        self.include_intercept = include_intercept
        self.max_q = max_q
        self.max_p = max_p
        self.alpha = alpha
        self.n_jobs = n_jobs

    def fit(self, data: Mapping, y=None):
        y = data[self.response]
        exog = {role: data[role] for role in self.exog_roles}
        if self.q is None:
            spec = select_lags(
                y, exog, self.response, self.max_q, self.max_p, self.include_intercept, self.n_jobs
            )
            spec = spec.without(*self.removed) if self.removed else spec
        else:
            orders = self.exog_orders or {}
            spec = LagSpec(
                self.response,
                self.q,
                tuple((role, orders[role]) for role in self.exog_roles),
                frozenset(self.removed),
                self.include_intercept,
            )
        self.selected_spec_ = spec
        if self.alpha is None:
            X, target, labels = build_design(y, exog, spec)
            self.spec_, self.result_ = spec, ols_fit(X, target, labels, spec)
        else:
            self.spec_, self.result_ = prune_insignificant(y, exog, spec, self.alpha)
        return self

    def predict(self, data: Mapping) -> np.ndarray:
        """In-sample style predictions for every row the data supports."""
        check_is_fitted(self, "result_")
        X, _, _ = build_design(data[self.response], data, self.spec_)
        return self.result_.predict_design(X)
