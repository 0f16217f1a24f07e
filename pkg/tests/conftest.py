import random

import pytest

from doubleoctics.counting import SCHEMES, TableStack, build_all_tables, save_table, table_path
from doubleoctics.newforms import eta_table

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture(scope="session")
def tables():
    return build_all_tables("exact")


@pytest.fixture(scope="session")
def stack(tables):
    return TableStack(tables)


@pytest.fixture(scope="session")
def scheme_tables(tables):
    out = {"exact": tables}
    for scheme in SCHEMES[1:]:
        out[scheme] = build_all_tables(scheme)
    return out


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory, tables):
    d = tmp_path_factory.mktemp("cache")
    for t in tables:
        save_table(t, table_path(d, t.p, t.scheme))
    return d


@pytest.fixture(scope="session")
def eta_forms():
    return eta_table()


@pytest.fixture
def rng():
    return random.Random(20181010)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome.upper()
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}")
