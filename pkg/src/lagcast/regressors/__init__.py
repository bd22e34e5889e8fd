"""Random forest, SVR, KNN and MLP regressors sharing one labelled-feature contract."""

from .api import KINDS, fit, from_document, load, make, predict, save, to_document
from .base import FeatureMatrix, LabelledRegressor
from .forest import RandomForestRegressor, RegressionTree
from .knn import KNNRegressor, default_k
from .mlp import DEFAULT_HIDDEN, MLPRegressor, loss_and_gradient
from .svr import SVRRegressor, rbf_kernel, smo_solve
from .tuning import search_mlp_architecture, svr_grid_scores, tune_svr

__all__ = [
    "DEFAULT_HIDDEN",
    "KINDS",
    "FeatureMatrix",
    "KNNRegressor",
    "LabelledRegressor",
    "MLPRegressor",
    "RandomForestRegressor",
    "RegressionTree",
    "SVRRegressor",
    "default_k",
    "fit",
    "from_document",
    "load",
    "loss_and_gradient",
    "make",
    "predict",
    "rbf_kernel",
    "save",
    "search_mlp_architecture",
    "smo_solve",
    "svr_grid_scores",
    "to_document",
    "tune_svr",
]
