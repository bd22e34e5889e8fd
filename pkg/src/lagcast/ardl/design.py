"""Lag specifications and lagged design matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..exceptions import DataError, InvalidConfig, MissingLag, RemovedUnknownTerm, TooShort, UnknownRole
from ..series import TimeSeries, label_prefix

INTERCEPT = "(Intercept)"


def term_label(role: str, lag: int) -> str:
    """``Ct.t`` for the current value, ``Ct.2`` for the second lag."""
    return f"{label_prefix(role)}.{'t' if lag == 0 else lag}"


@dataclass(frozen=True)
class LagSpec:
    """Lag structure of one distributed-lag regression.

    Parameters
    ----------
    response : str
        Role of the modelled series.
    q : int
        Autoregressive lags ``1..q`` of the response.
    exog : tuple of (role, p)
        Exogenous series with lags ``0..p`` each, in column order.
    removed : frozenset of str
        Term labels dropped from the design.
    include_intercept : bool
    """

    response: str
    q: int = 0
    exog: tuple = ()
    removed: frozenset = field(default_factory=frozenset)
    include_intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "exog", tuple((str(r), int(p)) for r, p in self.exog))
        object.__setattr__(self, "removed", frozenset(self.removed))
        if self.q < 0 or any(p < 0 for _, p in self.exog):
            raise InvalidConfig("lag orders must be non-negative")
        roles = [r for r, _ in self.exog]
        if len(set(roles)) != len(roles) or self.response in roles:
            raise InvalidConfig(f"duplicate role in lag spec: {roles}")
        unknown = self.removed - {term_label(*t) for t in self.all_terms()}
        if unknown:
            raise RemovedUnknownTerm(f"removed terms not implied by the lag spec: {sorted(unknown)}")
        if not self.labels():
            raise InvalidConfig("lag spec leaves no regressors")

    @property
    def max_lag(self) -> int:
        return max([self.q, *(p for _, p in self.exog)])

    @property
    def exog_roles(self) -> tuple[str, ...]:
        return tuple(r for r, _ in self.exog)

    def all_terms(self) -> list[tuple[str, int]]:
        """(role, lag) pairs implied by the orders, before removal, in column order."""
        out = [(self.response, k) for k in range(1, self.q + 1)]
        for role, p in self.exog:
            out.extend((role, k) for k in range(p + 1))
        return out

    def terms(self) -> list[tuple[str, int]]:
        return [t for t in self.all_terms() if term_label(*t) not in self.removed]

    def labels(self) -> list[str]:
        """Column labels of the design, intercept first when present."""
        body = [term_label(*t) for t in self.terms()]
        return [INTERCEPT, *body] if self.include_intercept else body

    def feature_labels(self) -> list[str]:
        return [term_label(*t) for t in self.terms()]

    @property
    def n_params(self) -> int:
        return len(self.labels())

    def without(self, *labels: str) -> "LagSpec":
        return LagSpec(
            self.response, self.q, self.exog, self.removed | set(labels), self.include_intercept
        )

    def to_dict(self) -> dict:
        return {
            "response": self.response,
            "q": self.q,
            "exog": [[r, p] for r, p in self.exog],
            "removed": sorted(self.removed),
            "include_intercept": self.include_intercept,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "LagSpec":
        return cls(
            response=d["response"],
            q=int(d.get("q", 0)),
            exog=tuple((r, int(p)) for r, p in d.get("exog", ())),
            removed=frozenset(d.get("removed", ())),
            include_intercept=bool(d.get("include_intercept", True)),
        )


def _as_array(s) -> np.ndarray:
    if isinstance(s, TimeSeries):
        return s.values
    return np.asarray(s, dtype=float).reshape(-1)


def build_design(y, exog: Mapping, spec: LagSpec) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Lagged design matrix for ``spec``.

    ``y`` and every series in ``exog`` must be aligned and of equal length L.
    Row ``t`` targets ``y[max_lag + t]``; there are ``L - max_lag`` rows.

    Returns
    -------
    X : ndarray of shape (L - max_lag, n_params)
        Includes a leading column of ones when the lag spec has an intercept.
    target : ndarray of shape (L - max_lag,)
    labels : list of str
    """
    y = _as_array(y)
    series = {spec.response: y}
    for role in spec.exog_roles:
        if role not in exog:
            raise UnknownRole(f"no series supplied for role {role!r}")
        series[role] = _as_array(exog[role])
    length = len(y)
    if any(len(s) != length for s in series.values()):
        raise DataError("series passed to build_design must be aligned to equal length")
    m = spec.max_lag
    if length <= m:
        raise TooShort(f"series of length {length} is too short for maximum lag {m}")
    rows = length - m
    cols = []
    if spec.include_intercept:
        cols.append(np.ones(rows))
    for role, lag in spec.terms():
        cols.append(series[role][m - lag : length - lag])
    X = np.column_stack(cols) if cols else np.empty((rows, 0))
    return X, y[m:].copy(), spec.labels()


def lag_row(spec: LagSpec, window: Mapping, include_intercept: bool | None = None) -> np.ndarray:
    """Single design row from a lag window.

    ``window[spec.response]`` ends at ``t-1``; every exogenous window ends at
    ``t`` (its last element is the current value).
    """
    include_intercept = spec.include_intercept if include_intercept is None else include_intercept
    row = [1.0] if include_intercept else []
    for role, lag in spec.terms():
        if role not in window:
            raise MissingLag(f"window has no values for role {role!r}")
        values = _as_array(window[role])
        back = lag if role == spec.response else lag + 1
        if len(values) < back:
            raise MissingLag(f"{term_label(role, lag)} needs {back} values of {role!r}, got {len(values)}")
        row.append(values[len(values) - back])
    return np.asarray(row, dtype=float)
