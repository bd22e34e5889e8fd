from __future__ import annotations

import pytest

from helpers import run_config
from lagcast import pipeline


@pytest.fixture(scope="session")
def synthetic_cfg():
    return run_config()


@pytest.fixture(scope="session")
def synthetic_daily(synthetic_cfg):
    return pipeline.load_daily(synthetic_cfg)



def pytest_terminal_summary(terminalreporter):
    from helpers import acceptance_lines

    lines = acceptance_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
