import pytest

from picrecon.grid import Picture


def pic(*rows: str) -> Picture:
    return Picture.from_cells([[int(ch) for ch in row] for row in rows])


@pytest.fixture
def figure1_picture():
    return pic("101", "010", "110")


_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def record(request):
    """record(criterion, ok, detail): one acceptance line for the summary."""
    def add(criterion: int, ok: bool, detail: str = "") -> None:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        request.config.stash[_RESULTS].append(line)
    return add


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_RESULTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
