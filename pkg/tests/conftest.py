import os
from pathlib import Path

import pytest

from cubemix import canonical_index

CACHE_DIR = Path(os.environ.get("CUBEMIX_CACHE_DIR", Path(__file__).resolve().parents[1] / ".cache"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def tables():
    return canonical_index.load_or_build_tables(CACHE_DIR)


@pytest.fixture(scope="session")
def cache_dir():
    return CACHE_DIR


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
