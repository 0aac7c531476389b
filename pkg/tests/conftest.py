from pathlib import Path

import numpy as np
import pytest

from edgecloud import QuantizationLadder, Scenario

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def scenario():
    return Scenario()


@pytest.fixture
def smooth_scenario():
    levels = tuple(round(0.005 * k, 6) for k in range(1, 401))
    return Scenario(ladder=QuantizationLadder(levels))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
