"""Per-criterion reporting for the acceptance suite.

Acceptance tests carry ``@pytest.mark.criterion(k)``; a criterion passes
when every test tagged with it passes.  Tests may attach measured values
through the ``measured`` fixture; they are echoed in the summary.
"""

from collections import defaultdict

import pytest

_outcomes: dict = defaultdict(list)
_details: dict = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


@pytest.fixture
def measured(request):
    marker = request.node.get_closest_marker("criterion")

    def note(text: str):
        if marker is not None:
            _details[marker.args[0]].append(text)

    return note


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        _outcomes[marker.args[0]].append((item.name, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_outcomes):
        results = _outcomes[k]
        ok = all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        tr.write_line(line)
        for d in _details[k]:
            tr.write_line(f"    {d}")
