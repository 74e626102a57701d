"""Shared pytest hooks: collect acceptance-criterion verdict lines and
print them in the terminal summary, where output capture no longer
swallows them."""

CRITERION_LINES = []


def record_criterion(line):
    CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
