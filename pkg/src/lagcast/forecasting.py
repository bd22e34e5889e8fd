"""Recursive multi-step forecasts of the coupled deaths/confirmed/recovered system.

Each step computes every role's value at ``t + 1`` from the lag window and
then appends it, so later steps consume earlier forecasts as lags. Lag-0
cross terms make the roles at one step depend on each other; the roles are
grouped into strongly connected components of that dependency graph and
solved in topological order. A coupled group is solved exactly when all its
models are linear, otherwise by Gauss-Seidel iteration.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Mapping

import numpy as np

from .ardl.design import LagSpec, lag_row, term_label
from .ardl.ols import ArdlFit
from .exceptions import FixedPointDiverged, HistoryTooShort, InvalidConfig
from .regressors.base import FeatureMatrix, LabelledRegressor
from .series import CONFIRMED, DEATHS, RECOVERED, TimeSeries

# evaluation order among roles that do not constrain each other
ROLE_ORDER = (CONFIRMED, RECOVERED, DEATHS)
FIXED_POINT_RTOL = 1e-6
FIXED_POINT_MAX_ITER = 100


@dataclass(frozen=True)
class RoleModel:
    """A fitted one-step model together with the lag spec that feeds it."""

    spec: LagSpec
    backend: object

    def __post_init__(self):
        if not isinstance(self.backend, (ArdlFit, LabelledRegressor)):
            raise InvalidConfig(f"unsupported forecasting backend {type(self.backend).__name__}")

    @classmethod
    def from_fit(cls, fit: ArdlFit) -> "RoleModel":
        if fit.spec is None:
            raise InvalidConfig("fit has no lag spec attached")
        return cls(fit.spec, fit)

    @property
    def role(self) -> str:
        return self.spec.response

    @property
    def is_linear(self) -> bool:
        return isinstance(self.backend, ArdlFit)

    @property
    def backend_name(self) -> str:
        return "ardl" if self.is_linear else self.backend.kind

    def current_inputs(self) -> set[str]:
        """Roles whose same-step value this model consumes."""
        return {role for role, lag in self.spec.terms() if lag == 0 and role != self.role}

    def predict(self, window: Mapping) -> float:
        if self.is_linear:
            return float(lag_row(self.spec, window) @ self.backend.params)
        row = lag_row(self.spec, window, include_intercept=False)
        return float(self.backend.predict(FeatureMatrix(row[None, :], self.spec.feature_labels()))[0])

    def linear_form(self, window: Mapping, unknown) -> tuple[float, dict[str, float]]:
        """Split a linear model into a constant and coefficients on same-step unknowns.

        ``window`` must hold placeholder current values for the unknown roles;
        they are zeroed out of the constant.
        """
        coef = self.backend.coef
        const = self.predict(window)
        weights = {}
        for role, lag in self.spec.terms():
            if lag == 0 and role in unknown:
                c = coef[term_label(role, 0)]
                weights[role] = weights.get(role, 0.0) + c
                const -= c * float(window[role][-1])
        return const, weights


@dataclass
class SystemModel:
    """One model per forecast role."""

    models: dict

    def __post_init__(self):
        models = {}
        for role, m in dict(self.models).items():
            m = RoleModel.from_fit(m) if isinstance(m, ArdlFit) else m
            if m.role != role:
                raise InvalidConfig(f"model for {role!r} has response {m.role!r}")
            models[role] = m
        self.models = models
        for role, m in models.items():
            if role != DEATHS and DEATHS in m.spec.exog_roles:
                raise InvalidConfig(f"the {role} model must not use deaths as an input")
            missing = set(m.spec.exog_roles) - set(models)
            if missing:
                raise InvalidConfig(f"the {role} model needs forecasts of {sorted(missing)}")

    @property
    def roles(self) -> list[str]:
        known = [r for r in ROLE_ORDER if r in self.models]
        return known + sorted(r for r in self.models if r not in ROLE_ORDER)

    @property
    def max_lag(self) -> int:
        return max(m.spec.max_lag for m in self.models.values())

    @property
    def backend_name(self) -> str:
        names = sorted({m.backend_name for m in self.models.values()})
        return names[0] if len(names) == 1 else "+".join(names)

    def components(self) -> list[list[str]]:
        """Strongly connected groups of the same-step graph, inputs before consumers."""
        roles = self.roles
        deps = {r: self.models[r].current_inputs() for r in roles}

        def reach(start):
            seen, stack = {start}, [start]
            while stack:
                for nxt in deps[stack.pop()]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            return seen

        closure = {r: reach(r) for r in roles}
        groups, placed = [], set()
        for r in roles:
            if r not in placed:
                group = [s for s in roles if s in closure[r] and r in closure[s]]
                groups.append(group)
                placed.update(group)
        ordered, done = [], set()
        while groups:
            for g in groups:
                needs = set().union(*(deps[r] for r in g)) - set(g)
                if needs <= done:
                    ordered.append(g)
                    done.update(g)
                    groups.remove(g)
                    break
        return ordered


@dataclass
class ForecastResult:
    """Point forecasts per role on consecutive days after the history."""

    forecasts: dict
    start_date: date
    horizon: int
    backend: str
    history_start: date | None = None
    history_end: date | None = None
    roles: list = field(default_factory=list)

    @property
    def dates(self) -> list[date]:
        return [self.start_date + timedelta(days=i) for i in range(self.horizon)]

    def series(self, role: str) -> TimeSeries:
        return TimeSeries(role, self.start_date, self.forecasts[role])

    def points(self, role: str) -> list[tuple[date, float]]:
        return list(zip(self.dates, (float(v) for v in self.forecasts[role])))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["date", "role", "forecast"])
        for i, day in enumerate(self.dates):
            for role in self.roles or sorted(self.forecasts):
                writer.writerow([day.isoformat(), role, repr(float(self.forecasts[role][i]))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "horizon": self.horizon,
            "start_date": self.start_date.isoformat(),
            "history": {
                "start": None if self.history_start is None else self.history_start.isoformat(),
                "end": None if self.history_end is None else self.history_end.isoformat(),
            },
            "forecasts": [
                {"date": day.isoformat(), "role": role, "forecast": float(self.forecasts[role][i])}
                for i, day in enumerate(self.dates)
                for role in (self.roles or sorted(self.forecasts))
            ],
        }


def _window(hist: dict, current: dict, consumer: RoleModel) -> dict:
    """Lag window for ``consumer``: own values end at t-1, inputs end at t.

    An input whose lag-0 term was pruned is not solved before the consumer;
    its unused current slot holds NaN.
    """
    window = {consumer.role: hist[consumer.role]}
    for role in consumer.spec.exog_roles:
        window[role] = hist[role] + [current.get(role, np.nan)]
    return window


def _solve_group(group, system, hist, current, step, method):
    models = [system.models[r] for r in group]
    if len(group) == 1 and group[0] not in models[0].current_inputs():
        m = models[0]
        current[m.role] = m.predict(_window(hist, current, m))
        return
    for r in group:
        current[r] = hist[r][-1]
    if method != "fixed_point" and all(m.is_linear for m in models):
        A = np.zeros((len(group), len(group)))
        b = np.zeros(len(group))
        pos = {r: i for i, r in enumerate(group)}
        for i, m in enumerate(models):
            const, weights = m.linear_form(_window(hist, current, m), set(group))
            b[i] = const
            for role, w in weights.items():
                A[i, pos[role]] = w
        try:
            x = np.linalg.solve(np.eye(len(group)) - A, b)
        except np.linalg.LinAlgError as exc:
            raise FixedPointDiverged(step, "singular simultaneous system") from exc
        for r, v in zip(group, x):
            current[r] = float(v)
        return
    for _ in range(FIXED_POINT_MAX_ITER):
        change = 0.0
        for m in models:
            old = current[m.role]
            new = m.predict(_window(hist, current, m))
            if not np.isfinite(new):
                raise FixedPointDiverged(step, "non-finite iterate")
            current[m.role] = new
            change = max(change, abs(new - old) / max(abs(new), 1e-300) if new != old else 0.0)
        if change < FIXED_POINT_RTOL:
            return
    raise FixedPointDiverged(step, f"no convergence within {FIXED_POINT_MAX_ITER} iterations")


def _history_arrays(history: Mapping) -> tuple[dict, date | None, date | None]:
    arrays, starts, ends = {}, set(), set()
    for role, s in history.items():
        if isinstance(s, TimeSeries):
            starts.add(s.start_date)
            ends.add(s.end_date)
            arrays[role] = [float(v) for v in s.values]
        else:
            arrays[role] = [float(v) for v in np.asarray(s, dtype=float).reshape(-1)]
    if len(ends) > 1:
        raise InvalidConfig("history series must end on the same day")
    lengths = {len(v) for v in arrays.values()}
    if len(lengths) > 1:
        raise InvalidConfig("history series must be aligned to equal length")
    return arrays, (min(starts) if starts else None), (ends.pop() if ends else None)


def recursive_forecast(
    system: SystemModel,
    history: Mapping,
    h: int,
    *,
    floor_at_zero: bool = False,
    method: str = "auto",
    start_date: date | None = None,
) -> ForecastResult:
    """Forecast every role of ``system`` for ``h`` steps.

    Parameters
    ----------
    system : SystemModel
    history : mapping of role to TimeSeries or array
        Aligned daily values ending on the same day.
    h : int
    floor_at_zero : bool
        Clamp each forecast at zero before it is fed back as a lag.
    method : {"auto", "fixed_point"}
        ``auto`` solves coupled linear groups exactly; ``fixed_point``
        always iterates.
    start_date : date, optional
        First forecast date when ``history`` holds plain arrays.
    """
    if h < 1:
        raise InvalidConfig("horizon must be at least 1")
    if method not in ("auto", "fixed_point"):
        raise InvalidConfig(f"unknown coupling method {method!r}")
    missing = set(system.roles) - set(history)
    if missing:
        raise HistoryTooShort(f"no history for {sorted(missing)}")
    hist, first, last = _history_arrays({r: history[r] for r in system.roles})
    n = len(next(iter(hist.values())))
    if n < max(1, system.max_lag):
        raise HistoryTooShort(f"history of {n} days is shorter than the maximum lag {system.max_lag}")
    if last is not None:
        start_date = last + timedelta(days=1)
    elif start_date is None:
        raise InvalidConfig("start_date is required when history has no dates")

    groups = system.components()
    out = {r: np.empty(h) for r in system.roles}
    for step in range(h):
        current = {}
        for group in groups:
            _solve_group(group, system, hist, current, step, method)
        for r in system.roles:
            v = current[r]
            if not np.isfinite(v):
                raise FixedPointDiverged(step, f"non-finite {r} forecast")
            if floor_at_zero:
                v = max(v, 0.0)
            out[r][step] = v
            hist[r].append(v)
    return ForecastResult(out, start_date, h, system.backend_name, first, last, system.roles)


def univariate_forecast(model, history, h: int, *, floor_at_zero: bool = False, start_date: date | None = None):
    """Forecast a single series from its own lags; returns (date, value) pairs."""
    model = RoleModel.from_fit(model) if isinstance(model, ArdlFit) else model
    if model.spec.exog:
        raise InvalidConfig("univariate forecasting needs a model without exogenous inputs")
    system = SystemModel({model.role: model})
    result = recursive_forecast(
        system, {model.role: history}, h, floor_at_zero=floor_at_zero, start_date=start_date
    )
    return result.points(model.role)
