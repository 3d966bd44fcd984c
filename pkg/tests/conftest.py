from __future__ import annotations

import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
