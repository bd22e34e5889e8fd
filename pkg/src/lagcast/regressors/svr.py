"""Epsilon-insensitive support vector regression with an RBF kernel."""

from __future__ import annotations

import logging

import numpy as np

from ..exceptions import InvalidConfig
from .base import LabelledRegressor, standardize_stats

logger = logging.getLogger(__name__)

_TAU = 1e-12


def rbf_kernel(A, B, gamma):
    """``exp(-gamma * ||a - b||^2)`` for every row pair."""
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


class SmoResult:
    """Outcome of :func:`smo_solve`."""

    def __init__(self, alpha, rho, iterations, violation, objective_history):
        self.alpha = alpha
        self.rho = rho
        self.iterations = iterations
        self.violation = violation
        self.objective_history = objective_history


def smo_solve(K, y, C, epsilon, tol=1e-3, max_iter=10_000, record=True) -> SmoResult:
    """Solve the epsilon-SVR dual with second-order working-set selection.

    The problem is posed over ``2n`` variables as in libsvm: the first ``n``
    carry label +1 and linear term ``epsilon - y``, the last ``n`` carry -1
    and ``epsilon + y``. ``objective_history`` holds the dual objective in
    maximisation form after every update.
    """
    n = len(y)
    ys = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon - y, epsilon + y])
    idx = np.concatenate([np.arange(n), np.arange(n)])
    diag = np.diag(K)[idx]
    a = np.zeros(2 * n)
    G = p.copy()
    history = [0.0] if record else []
    it = 0
    violation = np.inf

    while True:
        up = ((ys > 0) & (a < C)) | ((ys < 0) & (a > 0))
        low = ((ys > 0) & (a > 0)) | ((ys < 0) & (a < C))
        minus_yG = -ys * G
        if not up.any() or not low.any():
            violation = 0.0
            break
        cand = np.where(up, minus_yG, -np.inf)
        i = int(np.argmax(cand))
        gmax = cand[i]
        gmax2 = float(np.max(np.where(low, -minus_yG, -np.inf)))
        violation = gmax + gmax2
        if violation < tol or it >= max_iter:
            break

        Ki = K[idx[i], idx]  # kernel row of i against all 2n variables
        Qi = ys[i] * ys * Ki
        b = gmax - minus_yG
        ok = low & (b > 0)
        if not ok.any():
            break
        quad = diag[i] + diag - 2.0 * Ki
        quad = np.where(quad > 0, quad, _TAU)
        score = np.where(ok, -(b * b) / quad, np.inf)
        j = int(np.argmin(score))

        Qj = ys[j] * ys * K[idx[j], idx]
        ai_old, aj_old = a[i], a[j]
        if ys[i] != ys[j]:
            qd = Qi[i] + Qj[j] + 2.0 * Qi[j]
            delta = (-G[i] - G[j]) / max(qd, _TAU)
            diff = ai_old - aj_old
            ai, aj = ai_old + delta, aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            qd = Qi[i] + Qj[j] - 2.0 * Qi[j]
            delta = (G[i] - G[j]) / max(qd, _TAU)
            total = ai_old + aj_old
            ai, aj = ai_old - delta, aj_old + delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        a[i], a[j] = ai, aj
        G += Qi * (ai - ai_old) + Qj * (aj - aj_old)
        it += 1
        if record:
            # f = 0.5 a'Qa + p'a = 0.5 a'(G + p)
            history.append(-0.5 * float(a @ (G + p)))

    rho = _calculate_rho(a, ys, G, C)
    return SmoResult(a, rho, it, float(max(violation, 0.0)), np.asarray(history))


def _calculate_rho(a, ys, G, C):
    yG = ys * G
    at_upper = a >= C
    at_lower = a <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(yG[free].mean())
    ub_mask = (at_upper & (ys < 0)) | (at_lower & (ys > 0))
    lb_mask = (at_upper & (ys > 0)) | (at_lower & (ys < 0))
    ub = yG[ub_mask].min() if ub_mask.any() else np.inf
    lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
    return float((ub + lb) / 2.0)


class SVRRegressor(LabelledRegressor):
    """Epsilon-SVR on standardised features.

    Parameters
    ----------
    C : float, default 100
    gamma : float, default 0.1
        RBF width in ``exp(-gamma * ||u - v||^2)``.
    epsilon : float, default 0.3
        Tube half-width, in standardised target units when ``scale_target``.
    tol : float, default 1e-3
        Stopping tolerance on the maximal KKT violation.
    max_passes : int, default 10_000
        Cap on pair updates, as a multiple of the training size.
    scale_target : bool, default True
        Standardise the target as well as the features.

    Attributes
    ----------
    dual_coef_ : ndarray
        ``alpha_i - alpha_i*`` for each training row.
    intercept_ : float
    kkt_violation_ : float
        Maximal KKT violation at exit.
    objective_history_ : ndarray
        Dual objective (maximisation form) after each update.
    """

    kind = "svr"
    _state_attrs = ("x_mean_", "x_scale_", "y_mean_", "y_scale_", "support_vectors_", "dual_coef_", "intercept_")

    def __init__(self, C=100.0, gamma=0.1, epsilon=0.3, tol=1e-3, max_passes=10_000, scale_target=True):
        self.C = C
        self.gamma = gamma
        self.epsilon = epsilon
        self.tol = tol
        self.max_passes = max_passes
        self.scale_target = scale_target

    def _check_params(self):
        if not self.C > 0:
            raise InvalidConfig("C must be positive")
        if not self.gamma > 0:
            raise InvalidConfig("gamma must be positive")
        if not self.epsilon >= 0:
            raise InvalidConfig("epsilon must be non-negative")
        if not self.tol > 0 or self.max_passes < 1:
            raise InvalidConfig("tol must be positive and max_passes at least 1")

    def fit(self, X, y=None):
        X, y = self._validate_fit(X, y)
        self._check_params()
        self.x_mean_, self.x_scale_ = standardize_stats(X)
        Z = (X - self.x_mean_) / self.x_scale_
        if self.scale_target:
            self.y_mean_ = float(y.mean())
            sd = float(y.std())
            self.y_scale_ = sd if sd > 0 else 1.0
        else:
            self.y_mean_, self.y_scale_ = 0.0, 1.0
        t = (y - self.y_mean_) / self.y_scale_
        K = rbf_kernel(Z, Z, self.gamma)
        res = smo_solve(K, t, float(self.C), float(self.epsilon), self.tol, self.max_passes * len(y))
        n = len(y)
        coef = res.alpha[:n] - res.alpha[n:]
        support = np.flatnonzero(coef != 0)
        self.support_ = support
        self.support_vectors_ = Z[support]
        self.dual_coef_ = coef[support]
        self.intercept_ = -res.rho
        self.alpha_ = res.alpha
        self.n_iter_ = res.iterations
        self.kkt_violation_ = res.violation
        self.converged_ = res.violation < self.tol
        self.objective_history_ = res.objective_history
        if not self.converged_:
            logger.warning("SVR stopped after %d updates with KKT violation %.3g", res.iterations, res.violation)
        return self

    def decision_function(self, X):
        """Kernel expansion on standardised inputs, in scaled target units."""
        X = self._validate_predict(X)
        Z = (X - self.x_mean_) / self.x_scale_
        if len(self.dual_coef_) == 0:
            return np.full(len(Z), self.intercept_)
        return rbf_kernel(Z, self.support_vectors_, self.gamma) @ self.dual_coef_ + self.intercept_

    def predict(self, X):
        return self.decision_function(X) * self.y_scale_ + self.y_mean_

    def set_state(self, state, feature_labels):
        super().set_state(state, feature_labels)
        self.support_vectors_ = np.asarray(self.support_vectors_, dtype=float).reshape(-1, len(feature_labels))
        self.dual_coef_ = np.asarray(self.dual_coef_, dtype=float).reshape(-1)
        for name in ("x_mean_", "x_scale_"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        return self
