from pathlib import Path

import pytest

from schoolmatch import textio

FIXTURES = Path(__file__).parent / "fixtures"


def load(name):
    return textio.parse_instance((FIXTURES / f"{name}.txt").read_text())


@pytest.fixture
def scp1():
    return load("scp1")


@pytest.fixture
def scp2():
    return load("scp2")


@pytest.fixture
def scp3():
    return load("scp3")


@pytest.fixture
def scp4():
    return load("scp4")


@pytest.fixture
def scp5():
    return load("scp5")


@pytest.fixture
def scp6():
    return load("scp6")
