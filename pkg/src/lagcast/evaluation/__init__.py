"""Error measures, k-fold schemes and the model comparison harness."""

from .folds import Contiguous, Shuffled, k_fold, scheme_from_name
from .metrics import Band, MetricsReport, band_of, metrics
from .compare import ComparisonRow, ComparisonTable, compare_models, derive_seed

__all__ = [
    "Band",
    "ComparisonRow",
    "ComparisonTable",
    "Contiguous",
    "MetricsReport",
    "Shuffled",
    "band_of",
    "compare_models",
    "derive_seed",
    "k_fold",
    "metrics",
    "scheme_from_name",
]
