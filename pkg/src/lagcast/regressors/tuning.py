"""Cross-validated SVR grid search and MLP architecture search."""

from __future__ import annotations

import logging

import numpy as np
from sklearn.base import clone

from ..evaluation.folds import Shuffled, k_fold
from ..evaluation.metrics import metrics
from ..exceptions import AllCandidatesFailed, InvalidConfig, LagcastError
from .base import FeatureMatrix
from .mlp import MLPRegressor, layer_shapes
from .svr import SVRRegressor

logger = logging.getLogger(__name__)


def svr_grid_scores(data: FeatureMatrix, grid, folds=10, seed=0, base=None, scheme=None) -> dict:
    """Mean validation RMSE of every ``(C, gamma)`` cell; failing cells score inf."""
    grid = [(float(c), float(g)) for c, g in grid]
    if not grid:
        raise InvalidConfig("SVR grid is empty")
    splits = k_fold(len(data), folds, Shuffled(seed) if scheme is None else scheme)
    base = SVRRegressor() if base is None else base
    scores = {}
    for C, gamma in grid:
        errs = []
        try:
            for train, val in splits:
                model = clone(base).set_params(C=C, gamma=gamma).fit(data.rows(train))
                part = data.rows(val)
                errs.append(metrics(part.y, model.predict(part.without_target()), partial=True).rmse)
            scores[(C, gamma)] = float(np.mean(errs))
        except LagcastError as exc:
            logger.warning("SVR cell C=%g gamma=%g failed: %s", C, gamma, exc)
            scores[(C, gamma)] = np.inf
    return scores


def tune_svr(data: FeatureMatrix, grid, folds=10, seed=0, base=None, scheme=None) -> SVRRegressor:
    """Unfitted SVR with the grid cell of lowest mean k-fold RMSE.

    Ties go to the smaller C, then the smaller gamma.
    """
    scores = svr_grid_scores(data, grid, folds, seed, base, scheme)
    C, gamma = min(scores, key=lambda cell: (scores[cell], cell))
    base = SVRRegressor() if base is None else base
    return clone(base).set_params(C=C, gamma=gamma)


def n_weights(n_in: int, hidden) -> int:
    return sum(r * c for r, c in layer_shapes(n_in, hidden))


def mlp_architecture_scores(train: FeatureMatrix, evaluation: FeatureMatrix, candidates, base=None) -> dict:
    base = MLPRegressor() if base is None else base
    scores = {}
    for hidden in candidates:
        hidden = tuple(int(w) for w in hidden)
        try:
            model = clone(base).set_params(hidden_layers=hidden).fit(train)
            pred = model.predict(evaluation.without_target())
            mape = metrics(evaluation.y, pred, drop_zero=True).mape
            scores[hidden] = mape if np.isfinite(mape) else np.inf
        except LagcastError as exc:
            logger.warning("MLP candidate %s failed: %s", hidden, exc)
            scores[hidden] = np.inf
    return scores


def search_mlp_architecture(train: FeatureMatrix, evaluation: FeatureMatrix, candidates, base=None) -> MLPRegressor:
    """Unfitted MLP whose hidden layers give the lowest MAPE on ``evaluation``.

    Every candidate is trained with the same seed. Ties go to the network
    with fewer weights. Candidates that fail to train are skipped.
    """
    candidates = [tuple(int(w) for w in c) for c in candidates]
    if not candidates:
        raise InvalidConfig("no MLP architectures to search")
    scores = mlp_architecture_scores(train, evaluation, candidates, base)
    finite = [c for c in candidates if np.isfinite(scores[c])]
    if not finite:
        raise AllCandidatesFailed("every MLP architecture failed to train")
    n_in = train.X.shape[1]
    best = min(finite, key=lambda c: (scores[c], n_weights(n_in, c)))
    base = MLPRegressor() if base is None else base
    return clone(base).set_params(hidden_layers=best)
