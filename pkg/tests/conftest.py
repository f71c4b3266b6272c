import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dlgctl.report import analyze_dialogue  # noqa: E402
from dlgctl.transcript import parse_transcript  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, list[tuple[str, str]]] = {}


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def load_example(n: int):
    return parse_transcript((FIXTURES / f"example{n}.dlg").read_text(encoding="utf-8"))


@pytest.fixture
def example():
    def _get(n, analyzed=True):
        d = load_example(n)
        return analyze_dialogue(d) if analyzed else d
    return _get


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _criteria.setdefault(marker.args[0], []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(o == "passed" for _, o in results)
        names = ", ".join(name for name, _ in results)
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  ({names})")
