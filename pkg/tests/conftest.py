import sys

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def fine_switching():
    """Force frequent GIL hand-offs so threads really interleave."""
    old = sys.getswitchinterval()
    sys.setswitchinterval(1e-6)
    yield
    sys.setswitchinterval(old)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid and rep.when in ("call", "setup"):
                name = rep.nodeid.split("::")[-1]
                detail = ""
                if outcome == "skipped" and isinstance(rep.longrepr, tuple):
                    detail = f" ({rep.longrepr[2]})"
                lines.append((name, outcome.upper(), detail))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome, detail in sorted(lines):
            terminalreporter.write_line(f"{name}: {'PASS' if outcome == 'PASSED' else outcome}{detail}")
