"""Ordinary least squares with the usual t/F inference."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import betainc

from ..exceptions import NotEnoughRows, RankDeficient
from .design import INTERCEPT, LagSpec


def student_t_sf(t: float, df: float) -> float:
    """Upper-tail probability P(T > t) of Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    t2 = t * t
    z = t2 / (df + t2)
    # P(|T| < |t|) = I_z(1/2, df/2), accurate near t = 0; the tail form
    # below avoids cancellation once the central mass passes one half
    central = float(betainc(0.5, df / 2.0, z))
    if central < 0.5:
        half = 0.5 * central
        return 0.5 - half if t > 0 else 0.5 + half
    # P(|T| > |t|) = I_x(df/2, 1/2) with x = df / (df + t^2), accurate in the tails
    tail = float(betainc(df / 2.0, 0.5, df / (df + t2)))
    return 0.5 * tail if t > 0 else 1.0 - 0.5 * tail


def two_sided_p(t: float, df: float) -> float:
    return 2.0 * student_t_sf(abs(t), df)


def f_sf(f: float, df1: float, df2: float) -> float:
    """Upper-tail probability of the F distribution."""
    if math.isnan(f):
        return math.nan
    if f <= 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return float(betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f)))


@dataclass(frozen=True)
class Term:
    label: str
    estimate: float
    std_error: float = math.nan
    t_value: float = math.nan
    p_value: float = math.nan


@dataclass(frozen=True)
class FStatistic:
    value: float
    df1: int
    df2: int
    p_value: float


def _clean(x):
    """JSON has no NaN/inf; map them to null."""
    x = float(x)
    return x if math.isfinite(x) else None


def _unclean(x):
    return math.nan if x is None else float(x)


@dataclass(frozen=True, eq=False)
class ArdlFit:
    """Estimated regression with a coefficient table and footer statistics."""

    terms: tuple
    residuals: np.ndarray = field(repr=False)
    residual_std_error: float
    r_squared: float
    adj_r_squared: float
    f_statistic: FStatistic | None
    n_obs: int
    spec: LagSpec | None = None

    @property
    def labels(self) -> list[str]:
        return [t.label for t in self.terms]

    @property
    def params(self) -> np.ndarray:
        return np.array([t.estimate for t in self.terms])

    @property
    def coef(self) -> dict[str, float]:
        return {t.label: t.estimate for t in self.terms}

    def term(self, label: str) -> Term:
        for t in self.terms:
            if t.label == label:
                return t
        raise KeyError(label)

    @property
    def intercept(self) -> float:
        return self.coef.get(INTERCEPT, 0.0)

    @classmethod
    def from_coefficients(cls, spec: LagSpec, coefficients: Mapping[str, float]) -> "ArdlFit":
        """Fit object carrying given coefficients and no inference, e.g. a published equation."""
        labels = spec.labels()
        missing = set(labels) - set(coefficients)
        if missing:
            raise KeyError(f"coefficients missing for {sorted(missing)}")
        terms = tuple(Term(lbl, float(coefficients[lbl])) for lbl in labels)
        return cls(terms, np.empty(0), math.nan, math.nan, math.nan, None, 0, spec)

    def predict_design(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.params

    def summary(self) -> str:
        lines = [f"{'Coefficients':<14}{'Estimate':>14}{'Std. Error':>14}{'t value':>10}{'P-value':>12}"]
        for t in self.terms:
            lines.append(
                f"{t.label:<14}{t.estimate:>14.6g}{t.std_error:>14.6g}{t.t_value:>10.3f}{t.p_value:>12.3g}"
            )
        lines.append("")
        lines.append(f"Residual standard error: {self.residual_std_error:.6g} on {self.n_obs - len(self.terms)} degrees of freedom")
        lines.append(f"Multiple R-squared: {self.r_squared:.4f}, Adjusted R-squared: {self.adj_r_squared:.4f}")
        if self.f_statistic is not None:
            f = self.f_statistic
            lines.append(f"F-statistic: {f.value:.4g} on {f.df1} and {f.df2} DF, p-value: {f.p_value:.3g}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        f = self.f_statistic
        return {
            "spec": None if self.spec is None else self.spec.to_dict(),
            "coefficients": [
                {
                    "label": t.label,
                    "estimate": _clean(t.estimate),
                    "std_error": _clean(t.std_error),
                    "t_value": _clean(t.t_value),
                    "p_value": _clean(t.p_value),
                }
                for t in self.terms
            ],
            "residual_std_error": _clean(self.residual_std_error),
            "r_squared": _clean(self.r_squared),
            "adj_r_squared": _clean(self.adj_r_squared),
            "f_statistic": None
            if f is None
            else {"value": _clean(f.value), "df1": f.df1, "df2": f.df2, "p_value": _clean(f.p_value)},
            "n_obs": self.n_obs,
            "residuals": [_clean(r) for r in self.residuals],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ArdlFit":
        f = d.get("f_statistic")
        return cls(
            terms=tuple(
                Term(
                    c["label"],
                    _unclean(c["estimate"]),
                    _unclean(c.get("std_error")),
                    _unclean(c.get("t_value")),
                    _unclean(c.get("p_value")),
                )
                for c in d["coefficients"]
            ),
            residuals=np.array([_unclean(r) for r in d.get("residuals", [])]),
            residual_std_error=_unclean(d.get("residual_std_error")),
            r_squared=_unclean(d.get("r_squared")),
            adj_r_squared=_unclean(d.get("adj_r_squared")),
            f_statistic=None
            if f is None
            else FStatistic(_unclean(f["value"]), int(f["df1"]), int(f["df2"]), _unclean(f["p_value"])),
            n_obs=int(d["n_obs"]),
            spec=None if d.get("spec") is None else LagSpec.from_dict(d["spec"]),
        )


def ols_fit(X, target, labels: Sequence[str], spec: LagSpec | None = None) -> ArdlFit:
    """Least squares via a QR decomposition, with R-style inference.

    An intercept is recognised by the ``(Intercept)`` label; it decides
    whether R-squared is centred and whether the F-test excludes it.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(target, dtype=float).reshape(-1)
    labels = list(labels)
    n, k = X.shape
    if len(labels) != k or len(y) != n:
        raise ValueError("X, target and labels disagree in shape")
    if n <= k:
        raise NotEnoughRows(f"{n} rows for {k} coefficients")
    if np.linalg.matrix_rank(X) < k:
        raise RankDeficient(f"design with columns {labels} is not of full column rank")

    Q, R = np.linalg.qr(X)
    beta = solve_triangular(R, Q.T @ y)
    R_inv = solve_triangular(R, np.eye(k))
    xtx_inv_diag = np.sum(R_inv * R_inv, axis=1)

    residuals = y - X @ beta
    rss = float(residuals @ residuals)
    df_resid = n - k
    sigma = math.sqrt(rss / df_resid)
    se = sigma * np.sqrt(xtx_inv_diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = beta / se
    p_values = [two_sided_p(float(t), df_resid) for t in t_values]

    has_intercept = INTERCEPT in labels
    df_int = 1 if has_intercept else 0
    tss = float(np.sum((y - y.mean()) ** 2)) if has_intercept else float(y @ y)
    r2 = 1.0 - rss / tss if tss > 0 else (1.0 if rss == 0 else 0.0)
    r2 = min(max(r2, 0.0), 1.0)
    adj = 1.0 - (1.0 - r2) * (n - df_int) / df_resid

    df_model = k - df_int
    fstat = None
    if df_model > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            f_value = float(np.divide((tss - rss) / df_model, rss / df_resid))
        fstat = FStatistic(f_value, df_model, df_resid, f_sf(f_value, df_model, df_resid))

    terms = tuple(
        Term(lbl, float(b), float(s), float(t), float(p))
        for lbl, b, s, t, p in zip(labels, beta, se, t_values, p_values)
    )
    return ArdlFit(terms, residuals, sigma, r2, adj, fstat, n, spec)
