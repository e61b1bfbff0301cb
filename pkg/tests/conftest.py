import sys
from pathlib import Path

import pytest

from curveml.data_io import read_elliptic_csv, read_genus2_csv

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def elliptic_records():
    return read_elliptic_csv(DATA / "elliptic_fixtures.csv")


@pytest.fixture(scope="session")
def genus2_records():
    return read_genus2_csv(DATA / "genus2_fixtures.csv")


class AcceptanceLog:
    """Collects one verdict line per acceptance criterion for the terminal summary."""

    def __init__(self):
        self.lines: list[str] = []

    def check(self, criterion: str, ok: bool, detail: str) -> None:
        self.lines.append(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, f"criterion {criterion}: {detail}"

    def skip(self, criterion: str, reason: str) -> None:
        self.lines.append(f"criterion {criterion}: SKIP - {reason}")
        pytest.skip(reason)


_LOG = AcceptanceLog()


@pytest.fixture(scope="session")
def acceptance():
    return _LOG


def pytest_terminal_summary(terminalreporter):
    if _LOG.lines:
        terminalreporter.section("acceptance criteria")
        for line in _LOG.lines:
            terminalreporter.write_line(line)
