from pathlib import Path

import numpy as np
import pytest

from fctklt.raster import load_pgm

DATA = Path(__file__).parent / "data"
PHOTOS = ("camera", "moon", "astronaut")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def photos():
    return {name: load_pgm(DATA / f"{name}.pgm") for name in PHOTOS}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
