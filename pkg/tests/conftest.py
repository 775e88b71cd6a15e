import re
import shutil

import pytest

from sbeval.core import BlockType, DropCall
from sbeval.fixtures import fixture_path

B11, B13, B31 = BlockType.B11, BlockType.B13, BlockType.B31


def calls(*pairs):
    return [DropCall(b, x) for b, x in pairs]


@pytest.fixture
def demo_workspace(tmp_path):
    root = tmp_path / "demo"
    shutil.copytree(fixture_path("demo_workspace"), root)
    return root


# one pass/fail line per acceptance criterion at the end of the run

_criteria = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not match:
        return
    key = (int(match.group(1)), match.group(2))
    if report.failed:
        _criteria[key] = "FAIL"
    elif report.when == "call":
        _criteria.setdefault(key, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), outcome in sorted(_criteria.items()):
        terminalreporter.write_line(f"{outcome}  criterion {num:2d}  {name.replace('_', ' ')}")
