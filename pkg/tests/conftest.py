import os
from pathlib import Path

import pytest
from hypothesis import settings

from tact.lang.parser import parse_model

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"
SCENARIOS = ROOT / "scenarios"

# Randomized tests are reproducible by default; TACT_SEED picks another seed.
SEED = int(os.environ.get("TACT_SEED", "20240601"))

settings.register_profile("tact", deadline=None, max_examples=150, derandomize="TACT_SEED" not in os.environ)
settings.load_profile("tact")


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    if "TACT_SEED" in os.environ and getattr(config.option, "hypothesis_seed", None) is None:
        config.option.hypothesis_seed = SEED


@pytest.fixture(scope="session")
def rr_source():
    return (FIXTURES / "request_response.tam").read_text()


@pytest.fixture(scope="session")
def rr_model(rr_source):
    return parse_model(rr_source)


@pytest.fixture(scope="session")
def seed():
    return SEED


# ------------------------------------------------- acceptance summary lines

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        _CRITERIA[number] = (title, report.outcome == "passed", getattr(item, "criterion_note", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, note = _CRITERIA[number]
        line = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}"
        if note:
            line += f" - {note}"
        terminalreporter.write_line(line)
