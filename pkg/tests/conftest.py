import csv
from pathlib import Path

import pytest

from vprcomp import _kernels
from vprcomp.outcomes import DatasetCollection, OutcomeMatrix

DATA = Path(__file__).parent / "data"

_acceptance = {}


@pytest.fixture(scope="session", autouse=True)
def _jit_warm():
    # keep JIT compilation out of timed sections
    _kernels.warmup()


@pytest.fixture
def data_dir():
    return DATA


def matrix(dataset, **columns):
    """OutcomeMatrix from 0/1 lists, e.g. ``matrix("toy", A=[1, 0], B=[1, 1])``."""
    names = list(columns)
    n = len(columns[names[0]])
    return OutcomeMatrix.from_table(dataset, names, [f"q{i}" for i in range(n)], [columns[t] for t in names])


def collection(*matrices):
    return DatasetCollection(matrices)


def write_rows(path, rows, header=("dataset", "technique", "query_id", "correct")):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def pytest_runtest_logreport(report):
    crit = getattr(report, "_criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[crit] = report.outcome


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result()._criterion = (marker.args[0], marker.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), outcome in sorted(_acceptance.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict}  {title}")
