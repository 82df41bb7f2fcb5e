import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one verdict line; all lines are repeated in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def emit(line: str) -> None:
        lines.append(line)
        print(line)
    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
