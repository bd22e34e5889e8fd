"""Point-forecast error measures and the MAPE accuracy bands."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from ..exceptions import LengthMismatch, ZeroActual


class Band(str, enum.Enum):
    HIGHLY_ACCURATE = "HighlyAccurate"
    GOOD = "Good"
    REASONABLE = "Reasonable"
    WEAK = "Weak"
    INACCURATE = "Inaccurate"


# lower edges of each band, in percent
_BAND_EDGES = ((50.0, Band.INACCURATE), (20.0, Band.WEAK), (10.0, Band.REASONABLE), (1.0, Band.GOOD))


def band_of(mape: float) -> Band:
    """Accuracy band of a MAPE value; a boundary belongs to the upper band.

    Below 1 is highly accurate and 1 to 10 good. The 20 and 50 cut-offs
    follow the usual Lewis scale.
    """
    if mape < 0 or math.isnan(mape):
        raise ValueError(f"MAPE must be non-negative, got {mape}")
    for edge, band in _BAND_EDGES:
        if mape >= edge:
            return band
    return Band.HIGHLY_ACCURATE


@dataclass(frozen=True)
class MetricsReport:
    """ME, RMSE, MAE, MPE and MAPE over ``n`` scored points.

    ``mpe``, ``mape`` and ``band`` are None in a partial report, which is
    produced when zero actuals make the percentage errors undefined.
    ``dropped`` counts zero-actual points removed on request.
    """

    me: float
    rmse: float
    mae: float
    mpe: float | None
    mape: float | None
    n: int
    band: Band | None = None
    dropped: int = 0

    @property
    def partial(self) -> bool:
        return self.mape is None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["band"] = None if self.band is None else self.band.value
        return d

    @classmethod
    def from_dict(cls, d) -> "MetricsReport":
        d = dict(d)
        d["band"] = None if d.get("band") is None else Band(d["band"])
        return cls(**d)

    @classmethod
    def mean_of(cls, reports) -> "MetricsReport":
        """Average each measure over several reports (cross-validation folds)."""
        reports = list(reports)
        if not reports:
            raise ValueError("no reports to average")

        def avg(name):
            vals = [getattr(r, name) for r in reports]
            return None if any(v is None for v in vals) else float(np.mean(vals))

        mape = avg("mape")
        return cls(
            me=avg("me"),
            rmse=avg("rmse"),
            mae=avg("mae"),
            mpe=avg("mpe"),
            mape=mape,
            n=sum(r.n for r in reports),
            band=None if mape is None else band_of(mape),
            dropped=sum(r.dropped for r in reports),
        )


def metrics(actual, predicted, *, partial: bool = False, drop_zero: bool = False) -> MetricsReport:
    """Error measures of ``predicted`` against ``actual``.

    ME is ``mean(Y - Yhat)``. RMSE and MAE are the usual root mean square
    and mean absolute errors. MPE is ``mean((Yhat - Y) / Y) * 100`` and
    MAPE is ``mean(|Yhat - Y| / |Y|) * 100``.

    Parameters
    ----------
    actual, predicted : array_like
    partial : bool
        With zero actuals present, return a report without the percentage
        measures instead of raising.
    drop_zero : bool
        Remove zero-actual points from every measure and count them in
        ``dropped``.

    Raises
    ------
    LengthMismatch
        Lengths differ or are zero.
    ZeroActual
        An actual value is zero and neither flag is set.

    Examples
    --------
    >>> r = metrics([100, 200], [110, 190])
    >>> (r.me, r.rmse, r.mae, r.mpe, r.mape)
    (0.0, 10.0, 10.0, 2.5, 7.5)
    """
    y = np.asarray(actual, dtype=float).reshape(-1)
    yhat = np.asarray(predicted, dtype=float).reshape(-1)
    if len(y) != len(yhat) or len(y) == 0:
        raise LengthMismatch(f"actual has {len(y)} values, predicted {len(yhat)}")
    dropped = 0
    zero = y == 0
    if zero.any() and drop_zero:
        dropped = int(zero.sum())
        y, yhat = y[~zero], yhat[~zero]
        if len(y) == 0:
            raise ZeroActual("every actual value is zero")
    elif zero.any() and not partial:
        raise ZeroActual(f"{int(zero.sum())} actual values are zero; percentage errors undefined")

    err = yhat - y
    me = float(np.mean(-err))
    rmse = float(np.sqrt(np.mean(err * err)))
    mae = float(np.mean(np.abs(err)))
    if (y == 0).any():
        return MetricsReport(me, rmse, mae, None, None, len(y), None, dropped)
    # scale before averaging so whole-percent errors average exactly
    mpe = float(np.mean(100.0 * err / y))
    mape = float(np.mean(100.0 * np.abs(err) / np.abs(y)))
    return MetricsReport(me, rmse, mae, mpe, mape, len(y), band_of(mape), dropped)
