import pytest

# lines recorded by the acceptance module, replayed in the terminal summary
ACCEPTANCE_LINES: list = []


@pytest.fixture
def criterion():
    def record(label: str, passed: bool, detail: str = ""):
        line = f"{'PASS' if passed else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
