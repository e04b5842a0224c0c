import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20111019)


@pytest.fixture(scope="session")
def natural_image():
    """A 60x72 crop of a standard photograph (not a multiple of 8 tall)."""
    from skimage import data

    return np.ascontiguousarray(data.astronaut()[96:156, 176:248])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
