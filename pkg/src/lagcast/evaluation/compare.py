"""Four-model comparison on a train/test split plus k-fold averages."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import clone

from ..exceptions import InvalidConfig, LabelMismatch, LagcastError
from ..regressors.api import KINDS, make
from ..regressors.base import FeatureMatrix
from .folds import Contiguous, Shuffled, k_fold
from .metrics import MetricsReport, metrics

logger = logging.getLogger(__name__)

MODEL_ORDER = ("rf", "svr", "knn", "mlp")
DISPLAY = {"rf": "RF", "svr": "SVR", "knn": "KNN", "mlp": "ANN"}
SPLITS = ("train", "test")
CSV_COLUMNS = ("model", "split", "status", "n", "ME", "RMSE", "MAE", "MPE", "MAPE", "band")


def derive_seed(master: int, index: int) -> int:
    """Independent 63-bit seed for stream ``index`` of ``master``."""
    ss = np.random.SeedSequence(int(master), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class ComparisonRow:
    kind: str
    split: str
    report: MetricsReport | None
    status: str = "ok"
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "model": self.kind,
            "split": self.split,
            "status": self.status,
            "error": self.error,
            "metrics": None if self.report is None else self.report.to_dict(),
        }


@dataclass
class ComparisonTable:
    """Train and test metrics per model, with k-fold means on the training rows."""

    rows: list
    cv: dict = field(default_factory=dict)
    role: str | None = None
    spec: dict | None = None
    seed: int = 0
    seeds: dict = field(default_factory=dict)
    folds: int = 10
    fold_scheme: str = "shuffled"

    def row(self, kind: str, split: str) -> ComparisonRow:
        for r in self.rows:
            if r.kind == kind and r.split == split:
                return r
        raise KeyError((kind, split))

    @property
    def failed(self) -> list[str]:
        return sorted({r.kind for r in self.rows if r.status != "ok"})

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "spec": self.spec,
            "seed": self.seed,
            "seeds": self.seeds,
            "folds": self.folds,
            "fold_scheme": self.fold_scheme,
            "rows": [r.to_dict() for r in self.rows],
            "cv": {k: (None if v is None else v.to_dict()) for k, v in self.cv.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            rep = r.report
            if rep is None:
                writer.writerow([DISPLAY[r.kind], r.split, r.status, "", "", "", "", "", "", ""])
                continue
            vals = [rep.me, rep.rmse, rep.mae, rep.mpe, rep.mape]
            writer.writerow(
                [DISPLAY[r.kind], r.split, r.status, rep.n]
                + ["" if v is None else repr(v) for v in vals]
                + ["" if rep.band is None else rep.band.value]
            )
        return buf.getvalue()


def _score(model, data: FeatureMatrix) -> MetricsReport:
    return metrics(data.y, model.predict(data.without_target()), drop_zero=True)


def compare_models(
    train: FeatureMatrix,
    test: FeatureMatrix,
    configs: dict | None = None,
    seed: int = 0,
    *,
    kinds=MODEL_ORDER,
    folds: int = 10,
    scheme: str = "shuffled",
    n_jobs: int = 1,
    role: str | None = None,
    spec: dict | None = None,
) -> ComparisonTable:
    """Fit every model kind on ``train`` and score it on both splits.

    Each kind also gets a k-fold run on ``train`` whose fold metrics are
    averaged into ``table.cv``. Kinds with a ``seed`` setting receive a seed
    derived from ``seed`` and their position in :data:`MODEL_ORDER`, so the
    table does not depend on ``n_jobs``. A kind that fails is reported with
    status ``failed`` and the rest of the table is still produced.

    Zero actual values are dropped from the percentage errors and counted in
    each report's ``dropped`` field.
    """
    if tuple(train.labels) != tuple(test.labels):
        raise LabelMismatch("train and test feature labels differ")
    for kind in kinds:
        if kind not in KINDS:
            raise InvalidConfig(f"unknown model kind {kind!r}")
    configs = configs or {}
    seeds = {kind: derive_seed(seed, MODEL_ORDER.index(kind)) for kind in kinds}
    cv_seed = derive_seed(seed, len(MODEL_ORDER))
    fold_scheme = Shuffled(cv_seed) if scheme == "shuffled" else Contiguous()
    splits = k_fold(len(train), folds, fold_scheme) if folds else []

    def run(kind):
        cfg = dict(configs.get(kind) or {})
        try:
            est = make(kind, cfg)
            if "seed" in est.get_params() and "seed" not in cfg:
                est.set_params(seed=seeds[kind])
            model = clone(est).fit(train)
            reports = [_score(model, train), _score(model, test)]
        except LagcastError as exc:
            logger.warning("%s failed: %s", kind, exc)
            return kind, None, str(exc), None
        cv = None
        if splits:
            try:
                cv = MetricsReport.mean_of(
                    _score(clone(est).fit(train.rows(tr)), train.rows(va)) for tr, va in splits
                )
            except LagcastError as exc:
                logger.warning("%s cross-validation failed: %s", kind, exc)
        return kind, reports, None, cv

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, kinds))
    else:
        results = [run(k) for k in kinds]

    rows, cv_table = [], {}
    for kind, reports, error, cv in results:
        for i, split in enumerate(SPLITS):
            if reports is None:
                rows.append(ComparisonRow(kind, split, None, "failed", error))
            else:
                rows.append(ComparisonRow(kind, split, reports[i]))
        cv_table[kind] = cv
    return ComparisonTable(
        rows=rows,
        cv=cv_table,
        role=role,
        spec=spec,
        seed=int(seed),
        seeds=seeds,
        folds=folds,
        fold_scheme=scheme,
    )
