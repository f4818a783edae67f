import itertools
import os
from pathlib import Path

import pytest

from kmodes_hr.core import Dataset

# Attribute values of the UCI nursery data in file order. The file lists
# every combination exactly once, lexicographically in this order.
NURSERY_VALUES = [
    ["usual", "pretentious", "great_pret"],
    ["proper", "less_proper", "improper", "critical", "very_crit"],
    ["complete", "completed", "incomplete", "foster"],
    ["1", "2", "3", "more"],
    ["convenient", "less_conv", "critical"],
    ["convenient", "inconv"],
    ["nonprob", "slightly_prob", "problematic"],
    ["recommended", "priority", "not_recom"],
]

# name -> (file name, label column when read without a header, m)
UCI_FILES = {
    "breast_cancer": ("breast-cancer-wisconsin.data", "10", 10),
    "mushroom": ("agaricus-lepiota.data", "0", 22),
    "nursery": ("nursery.data", "8", 8),
    "soybean": ("soybean-large.data", "0", 35),
}

_DETAILS = {}
_OUTCOMES = {}


@pytest.fixture(scope="session")
def nursery_grid():
    return Dataset.from_rows(itertools.product(*NURSERY_VALUES))


def uci_dir():
    value = os.environ.get("KMODES_UCI_DIR")
    return Path(value) if value else None


def uci_path(name):
    base = uci_dir()
    if base is None:
        return None
    path = base / UCI_FILES[name][0]
    return path if path.exists() else None


@pytest.fixture
def uci():
    """Loader for the canonical UCI files; skips when they are unavailable."""
    from kmodes_hr.harness import load_dataset

    def load(name):
        path = uci_path(name)
        if path is None:
            pytest.skip(
                f"{UCI_FILES[name][0]} not found; set KMODES_UCI_DIR to a directory "
                "holding the UCI files"
            )
        return load_dataset(path, label_column=UCI_FILES[name][1], header=False)

    return load


@pytest.fixture
def criterion(request):
    """Attach a label and measured detail to an acceptance test's report line."""
    nodeid = request.node.nodeid

    def note(label, detail=""):
        _DETAILS[nodeid] = (label, detail)

    return note


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        reason = ""
        if report.skipped and isinstance(report.longrepr, tuple):
            reason = report.longrepr[2].removeprefix("Skipped: ")
        _OUTCOMES.setdefault(report.nodeid, (report.outcome, reason))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (outcome, reason) in _OUTCOMES.items():
        label, detail = _DETAILS.get(nodeid, (nodeid.split("::")[-1], ""))
        tag = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[outcome]
        terminalreporter.write_line(f"{tag}  {label}  {detail or reason}".rstrip())

