def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and "::" in nodeid:
                rows.append((nodeid.split("::")[-1], status == "passed"))
    if not rows:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, passed in rows:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}")
