from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
RECIPES = ROOT / "src" / "pukanszky" / "recipes"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture
def recipe_dir():
    return RECIPES


@pytest.fixture
def golden_dir():
    return GOLDEN


_criteria = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion" in report.nodeid:
        _criteria.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_criteria, key=lambda t: int(t[0].split("_")[2])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status} {name}")
