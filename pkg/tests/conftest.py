import sys
from pathlib import Path

import pytest

from geodesic_ap.geodesics import TraceTable, trace_bound
from geodesic_ap.quadratic import ClassCache

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def records_path(tmp_path_factory):
    return tmp_path_factory.mktemp("cache") / "records.csv"


@pytest.fixture(scope="session")
def small_table():
    """Class-route weights for all traces up to X(1e5)."""
    return TraceTable(ClassCache()).extend(trace_bound(1e5))


@pytest.fixture(scope="session")
def big_table(records_path):
    """Class-route weights up to X(1e8), persisted to a session cache file."""
    return TraceTable(ClassCache(records_path)).extend(trace_bound(1e8))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """check(k, ok, detail): record one acceptance line, then assert."""

    def check(k, ok, detail):
        ACCEPTANCE_LINES.append(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
