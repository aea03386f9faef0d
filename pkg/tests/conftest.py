"""Shared pytest wiring: the acceptance verdict lines are collected here so
they always print in the terminal summary, pass or fail."""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
