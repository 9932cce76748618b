from collections import OrderedDict

import pytest

# criterion id -> (title, [(ok, detail), ...])
_ACCEPTANCE = OrderedDict()


@pytest.fixture
def record():
    """Store the measured outcome of an acceptance check for the summary."""

    def _record(criterion, title, ok, detail):
        _ACCEPTANCE.setdefault(criterion, (title, []))[1].append((bool(ok), detail))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE):
        title, checks = _ACCEPTANCE[crit]
        ok = all(c for c, _ in checks)
        detail = "; ".join(d for _, d in checks)
        terminalreporter.write_line(f"{crit:<5} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
