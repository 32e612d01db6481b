from pathlib import Path

import pytest

from cwfcm.dataset import load_csv

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"

_acceptance = {}


@pytest.fixture(scope="session")
def iris_path():
    return DATA / "iris.csv"


@pytest.fixture(scope="session")
def iris(iris_path):
    return load_csv(iris_path)


@pytest.fixture(scope="session")
def wdbc():
    return load_csv(DATA / "wdbc.csv", has_header=True)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        notes = [v for k, v in item.user_properties if k == "note"]
        _acceptance[number] = (title, report.outcome, notes)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, outcome, notes = _acceptance[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"AC{number:<2d} {status}  {title}")
        for note in notes:
            terminalreporter.write_line(f"      {note}")
