"""Distributed-lag regression, regressor comparison and recursive forecasting
of daily epidemic counts."""

__version__ = "0.1.0"

from .ardl import ArdlFit, LagSpec, fit_ardl, ols_fit, prune_insignificant, select_lags
from .evaluation import ComparisonTable, MetricsReport, compare_models, k_fold, metrics
from .exceptions import ConfigError, DataError, LagcastError, NumericalError
from .forecasting import ForecastResult, RoleModel, SystemModel, recursive_forecast, univariate_forecast
from .regressors import FeatureMatrix, KNNRegressor, MLPRegressor, RandomForestRegressor, SVRRegressor
from .series import CONFIRMED, DEATHS, RECOVERED, SplitSpec, TimeSeries, align, cumulative_to_daily, split

__all__ = [
    "CONFIRMED",
    "DEATHS",
    "RECOVERED",
    "ArdlFit",
    "ComparisonTable",
    "ConfigError",
    "DataError",
    "FeatureMatrix",
    "ForecastResult",
    "KNNRegressor",
    "LagSpec",
    "LagcastError",
    "MLPRegressor",
    "MetricsReport",
    "NumericalError",
    "RandomForestRegressor",
    "RoleModel",
    "SVRRegressor",
    "SplitSpec",
    "SystemModel",
    "TimeSeries",
    "align",
    "compare_models",
    "cumulative_to_daily",
    "fit_ardl",
    "k_fold",
    "metrics",
    "ols_fit",
    "prune_insignificant",
    "recursive_forecast",
    "select_lags",
    "split",
    "univariate_forecast",
]
