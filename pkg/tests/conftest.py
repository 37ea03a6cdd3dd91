import pytest

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one line per acceptance criterion for the terminal summary."""
    results = request.config.stash.setdefault(_ACCEPTANCE, {})

    def report(number: int, passed: bool, detail: str) -> bool:
        results[number] = (passed, detail)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        passed, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
