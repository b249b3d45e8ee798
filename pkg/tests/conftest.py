import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import corpus  # noqa: E402

from bakercrypt.chaos import KeyMaterial  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def jpeg_files() -> dict[str, bytes]:
    return corpus.jpeg_corpus()


@pytest.fixture(scope="session")
def gif_files() -> dict[str, bytes]:
    return corpus.gif_corpus()


@pytest.fixture(scope="session")
def key() -> KeyMaterial:
    return KeyMaterial(-0.1790288311, -0.1628589871)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
