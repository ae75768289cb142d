import time

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("default")

WALL_LIMIT = 60.0
ACCEPTANCE_LINES = []
_t0 = time.perf_counter()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _t0
    session.config._suite_wall = elapsed
    if elapsed > WALL_LIMIT and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    elapsed = getattr(config, "_suite_wall", time.perf_counter() - _t0)
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    status = "PASS" if elapsed <= WALL_LIMIT else "FAIL"
    terminalreporter.write_line(f"[{status}] 10b full suite wall time {elapsed:.1f} s (limit {WALL_LIMIT:.0f} s)")
