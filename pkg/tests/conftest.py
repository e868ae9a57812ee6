import pytest

_LINES = []


@pytest.fixture
def criterion_report():
    def report(name: str, passed: bool, detail: str = ""):
        tag = "PASS" if passed else "FAIL"
        line = f"[{tag}] {name}" + (f" — {detail}" if detail else "")
        _LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
