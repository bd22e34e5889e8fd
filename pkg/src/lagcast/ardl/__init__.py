"""Autoregressive distributed-lag regression."""

from .design import INTERCEPT, LagSpec, build_design, lag_row, term_label
from .estimator import ARDLModel, LagFeatures, OLSRegressor
from .ols import ArdlFit, FStatistic, Term, f_sf, ols_fit, student_t_sf, two_sided_p
from .selection import ardl_predict, candidate_grid, fit_ardl, prune_insignificant, select_lags

__all__ = [
    "INTERCEPT",
    "ARDLModel",
    "ArdlFit",
    "FStatistic",
    "LagFeatures",
    "LagSpec",
    "OLSRegressor",
    "Term",
    "ardl_predict",
    "build_design",
    "candidate_grid",
    "f_sf",
    "fit_ardl",
    "lag_row",
    "ols_fit",
    "prune_insignificant",
    "select_lags",
    "student_t_sf",
    "term_label",
    "two_sided_p",
]
