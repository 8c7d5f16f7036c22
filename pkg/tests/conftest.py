"""Prints one visible line per acceptance criterion after the test run."""

import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m:
                continue
            num = int(m.group(1))
            title = m.group(2).replace("_", " ")
            prev_ok, _ = rows.get(num, (True, title))
            rows[num] = (prev_ok and outcome == "passed", title)
    if not rows:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for num in sorted(rows):
        ok, title = rows[num]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"  criterion {num:2d} {status}: {title}")
