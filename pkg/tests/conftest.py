import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from beatty_lab.irrational import Surd  # noqa: E402

SQRT2 = Surd.sqrt(2)
SQRT3 = Surd.sqrt(3)
PHI = Surd(1, 1, 5, 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
