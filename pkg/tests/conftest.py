from __future__ import annotations

import re


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" and outcome != "error":
                continue
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", rep.nodeid)
            if m:
                rows.append((int(m.group(1)), m.group(2), outcome, dict(rep.user_properties)))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, outcome, props in sorted(rows):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        extra = ", ".join(f"{k}={v}" for k, v in props.items())
        line = f"criterion {num:2d} {name}: {verdict}"
        if extra:
            line += f"  [{extra}]"
        terminalreporter.write_line(line)
