"""Shared test helpers: fixture locations and small constructors."""

from __future__ import annotations

import os
from datetime import date
from pathlib import Path

import numpy as np

from lagcast import config
from lagcast.series import TimeSeries

FIXTURES = Path(__file__).parent / "fixtures"
SYNTHETIC_DIR = FIXTURES / "jhu_synthetic"
SNAPSHOT_DIR = Path(os.environ.get("LAGCAST_SNAPSHOT_DIR", FIXTURES / "jhu_snapshot"))


def snapshot_available() -> bool:
    return all((SNAPSHOT_DIR / f"time_series_covid19_{r}_global.csv").exists() for r in config.ALL_ROLES)


def run_config(data_dir=SYNTHETIC_DIR, **flags) -> dict:
    flags.setdefault("offline", True)
    flags.setdefault("split_date", "2020-11-07")
    return config.resolve(None, {"data_dir": str(data_dir), **flags})


def series(values, role="deaths", start=date(2020, 1, 22)) -> TimeSeries:
    return TimeSeries(role, start, np.asarray(values, dtype=float))


# acceptance outcomes: criterion -> list of (check, status, detail)
ACCEPTANCE: dict[str, list[tuple[str, str, str]]] = {}


def record(criterion: str, check: str, status: str, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((check, status, detail))


def acceptance_lines() -> list[str]:
    def order(key):
        head = key.split()[0]
        return (0, int(head)) if head.isdigit() else (1, 0)

    lines = []
    for criterion in sorted(ACCEPTANCE, key=order):
        checks = ACCEPTANCE[criterion]
        statuses = {s for _, s, _ in checks}
        status = "FAIL" if "FAIL" in statuses else ("REPORT" if statuses == {"REPORT"} else "PASS")
        detail = "; ".join(f"{c}: {s}{' (' + d + ')' if d else ''}" for c, s, d in checks)
        lines.append(f"{status} criterion {criterion}: {detail}")
    return lines
