"""Shared test configuration: acceptance criteria summary lines.

Every test in test_acceptance.py represents one acceptance criterion; the
terminal summary prints one PASS/FAIL line per criterion regardless of
capture settings.
"""


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome, status in (("passed", "PASS"), ("failed", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" not in getattr(report, "nodeid", ""):
                continue
            if outcome != "skipped" and report.when != "call":
                continue
            name = report.nodeid.split("::")[-1]
            label = name.replace("test_", "", 1).replace("_", " ")
            lines.append((label, status))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, status in sorted(set(lines)):
            terminalreporter.write_line(f"{status}: {label}")
