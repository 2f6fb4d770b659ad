import numpy as np
import pytest

from magsim.scenarios import preset_params


@pytest.fixture
def fig2_matched():
    return preset_params("fig2a")


@pytest.fixture
def fig2_params():
    return preset_params("fig2b")


@pytest.fixture
def fig3_params():
    return preset_params("fig3")


@pytest.fixture
def fig4_params():
    return preset_params("fig4")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS, key=lambda k: (int(k.rstrip("abc")), k)):
        ok, text = RESULTS[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {text}")
