import sys


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance-criterion verdict lines after the test run.

    The criteria print one line each as they run, but pytest's fd-level
    capture hides those for passing tests; the summary is always visible.
    """
    for name, module in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance":
            lines = getattr(module, "_lines", [])
            if lines:
                terminalreporter.section("acceptance criteria")
                for line in sorted(lines):
                    terminalreporter.write_line(line)
            return
