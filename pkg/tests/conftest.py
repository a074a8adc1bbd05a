import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> (passed, description), filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {n}: {text}")
