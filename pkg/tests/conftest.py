import pytest

from scla.config import ExperimentConfig


@pytest.fixture
def quiet_config():
    """No background noise, sensory amplitude 15."""
    return ExperimentConfig(i_noise=0.0, i_sense=15.0)


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, passed, detail)."""
    def record(number, passed, detail):
        _ACCEPTANCE.append((number, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"AC{number}: {'PASS' if passed else 'FAIL'}  {detail}")
