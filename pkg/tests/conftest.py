from pathlib import Path

import pytest

from pm25kit.data_model import embedded_paper_dataset, load_dataset

DATA = Path(__file__).parent / "data"
SYNTHETIC_CSV = DATA / "synthetic_full.csv"


@pytest.fixture(scope="session")
def embedded():
    return embedded_paper_dataset()


@pytest.fixture(scope="session")
def synthetic():
    return load_dataset(SYNTHETIC_CSV)


@pytest.fixture
def synthetic_path():
    return SYNTHETIC_CSV


ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the summary table."""
    name = request.node.name

    def record(label: str, detail: str = ""):
        ACCEPTANCE[name] = (label, detail)

    yield record


def pytest_runtest_makereport(item, call):
    if call.when == "call" and item.name in ACCEPTANCE:
        label, detail = ACCEPTANCE[item.name]
        status = "SKIP" if call.excinfo and call.excinfo.errisinstance(pytest.skip.Exception) else \
            "FAIL" if call.excinfo else "PASS"
        ACCEPTANCE[item.name] = (label, f"{status}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, line in sorted(ACCEPTANCE.values()):
        terminalreporter.write_line(f"{label:<34} {line}")
