import pytest
from hypothesis import settings

settings.register_profile("repo", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("repo")

# criterion number -> (passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record and print a pass/fail line for one acceptance criterion."""
    def record(number, passed, detail=""):
        ACCEPTANCE[number] = (bool(passed), detail)
        print("criterion {}: {}{}".format(number, "pass" if passed else "fail", "; " + detail if detail else ""))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line("criterion {}: {}{}".format(
            number, "pass" if passed else "fail", "; " + detail if detail else ""))
