"""Lag-order search, backward elimination and one-step prediction."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping

import numpy as np

from ..exceptions import LagcastError, NoFeasibleCandidate, NumericalError, TooShort
from .design import INTERCEPT, LagSpec, build_design, lag_row
from .ols import ArdlFit, ols_fit

logger = logging.getLogger(__name__)

ADJ_R2_TIE_TOL = 1e-9


def fit_ardl(y, exog: Mapping, spec: LagSpec) -> ArdlFit:
    X, target, labels = build_design(y, exog, spec)
    return ols_fit(X, target, labels, spec)


def candidate_grid(response: str, exog_roles, max_q: int, max_p, include_intercept: bool = True):
    """Every LagSpec with q in 0..max_q and p_j in 0..max_p[j]."""
    exog_roles = list(exog_roles)
    if isinstance(max_p, int):
        max_p = {role: max_p for role in exog_roles}
    ranges = [range(max_q + 1)] + [range(max_p[role] + 1) for role in exog_roles]
    for orders in itertools.product(*ranges):
        q, ps = orders[0], orders[1:]
        if q == 0 and not exog_roles and not include_intercept:
            continue
        yield LagSpec(response, q, tuple(zip(exog_roles, ps)), include_intercept=include_intercept)


def _order_key(spec: LagSpec):
    return (spec.n_params, (spec.q, *(p for _, p in spec.exog)))


def select_lags(
    y,
    exog: Mapping,
    response: str,
    max_q: int,
    max_p,
    include_intercept: bool = True,
    n_jobs: int = 1,
) -> LagSpec:
    """Exhaustive lag-order search by adjusted R-squared, then parsimony.

    Candidates whose adjusted R-squared is within ``1e-9`` of the best are
    tied; ties go to fewer parameters, then to the lexicographically smaller
    ``(q, p_1, p_2, ...)``. Candidates that cannot be fitted are skipped.

    Parameters
    ----------
    y : TimeSeries or array
    exog : mapping of role to TimeSeries or array
        Exogenous series, searched in mapping order.
    response : str
        Role of ``y``.
    max_q : int
    max_p : int or mapping of role to int
    """
    candidates = list(candidate_grid(response, list(exog), max_q, max_p, include_intercept))

    def score(spec):
        try:
            return spec, fit_ardl(y, exog, spec).adj_r_squared
        except (NumericalError, TooShort) as exc:
            logger.debug("skipping %s: %s", spec, exc)
            return spec, None

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            scored = list(pool.map(score, candidates))
    else:
        scored = [score(c) for c in candidates]
    feasible = [(s, a) for s, a in scored if a is not None and np.isfinite(a)]
    if not feasible:
        raise NoFeasibleCandidate("no candidate lag specification could be fitted")
    best = max(a for _, a in feasible)
    tied = [s for s, a in feasible if a >= best - ADJ_R2_TIE_TOL]
    return min(tied, key=_order_key)


def prune_insignificant(y, exog: Mapping, spec: LagSpec, alpha: float = 0.10) -> tuple[LagSpec, ArdlFit]:
    """Backward elimination: drop the least significant term while its p > alpha.

    The intercept is never removed. One term is dropped per refit.
    """
    fit = fit_ardl(y, exog, spec)
    while True:
        candidates = [t for t in fit.terms if t.label != INTERCEPT]
        if not candidates:
            return spec, fit
        # NaN p-values (exact fits) count as significant
        worst = max(candidates, key=lambda t: -1.0 if np.isnan(t.p_value) else t.p_value)
        if np.isnan(worst.p_value) or worst.p_value <= alpha:
            return spec, fit
        if len(candidates) == 1 and not spec.include_intercept:
            return spec, fit
        spec = spec.without(worst.label)
        fit = fit_ardl(y, exog, spec)


def ardl_predict(fit: ArdlFit, window: Mapping) -> float:
    """One-step value of a fitted model.

    ``window`` maps each role to its recent values, oldest first. The
    response window ends at ``t-1``; exogenous windows end at ``t``.
    """
    if fit.spec is None:
        raise LagcastError("fit has no lag spec attached")
    row = lag_row(fit.spec, window)
    return float(row @ fit.params)
