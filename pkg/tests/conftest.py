import numpy as np
import pytest

from satghi.core import AlignedTable, GhiSeries, Source, Unit

T0 = np.datetime64("2020-06-01T00", "h")


def hours(*offsets):
    return np.array([T0 + np.timedelta64(int(o), "h") for o in offsets], dtype="datetime64[h]")


def series(values, offsets=None, source=Source.GROUND, unit=Unit.WATTS_PER_SQM):
    offsets = range(len(values)) if offsets is None else offsets
    return GhiSeries(source, unit, hours(*offsets), np.asarray(values, dtype=float))


def table(rows):
    """rows: iterable of (hour offset or datetime64, ground, satellite)."""
    rows = list(rows)
    times = [r[0] if isinstance(r[0], np.datetime64) else T0 + np.timedelta64(r[0], "h") for r in rows]
    return AlignedTable(
        np.array(times, dtype="datetime64[h]"),
        np.array([r[1] for r in rows], dtype=float),
        np.array([r[2] for r in rows], dtype=float),
    )


@pytest.fixture
def make_series():
    return series


@pytest.fixture
def make_table():
    return table


# ---------------------------------------------------------------- acceptance summary

_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _ACCEPTANCE.append((marker.args[0], "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in _ACCEPTANCE:
        terminalreporter.write_line(f"{verdict}  {name}")
