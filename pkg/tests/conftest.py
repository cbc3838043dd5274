import pathlib
import sys

import pytest

DATA = pathlib.Path(__file__).parent / "data"
sys.path.insert(0, str(pathlib.Path(__file__).parent))


def load(name):
    return (DATA / f"{name}.crn").read_text()


@pytest.fixture
def bd_text():
    return load("bd")


@pytest.fixture
def pb_text():
    return load("pb")


@pytest.fixture
def oscillator_text():
    return load("oscillator")


@pytest.fixture
def cascade_open_text():
    return load("cascade_open")
