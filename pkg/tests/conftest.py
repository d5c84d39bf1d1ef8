import numpy as np
import pytest

from hybridsom.ingest import MonthKey, ReadingTable


@pytest.fixture
def make_table():
    """Build a ReadingTable from (series, 'YYYY-MM-DD HH:MM', kwh) tuples."""

    def _make(rows):
        if not rows:
            return ReadingTable.empty("test")
        s, t, k = zip(*rows)
        return ReadingTable.from_columns(list(s), [x.replace(" ", "T") for x in t], list(k), source="test")

    return _make


def full_month_rows(sid, year, month, days, value=1.0, per_day=2):
    rows = []
    for d in days:
        for h in range(per_day):
            rows.append((sid, f"{year:04d}-{month:02d}-{d:02d} {h:02d}:00", value))
    return rows


@pytest.fixture
def jan2012():
    return MonthKey(2012, 1)


# acceptance summary --------------------------------------------------------

_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    def record(name: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def seeded(i: int) -> np.random.Generator:
    return np.random.default_rng(1000 + i)
