import pytest

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Recorder for one acceptance criterion: ``criterion(number, ok, detail)``."""
    seen = []

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        seen.append(number)
        print(line)
        return ok

    yield record
    if not seen:
        number = int(request.node.name.split("_")[1])
        _CRITERIA[number] = f"criterion {number}: FAIL  raised before reporting"


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
