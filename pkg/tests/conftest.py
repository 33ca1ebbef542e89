import pytest

from metamaass import suites
from metamaass.quadform import analyze


@pytest.fixture(scope="session")
def shintani_form():
    return analyze([[1]])


@pytest.fixture(scope="session")
def indefinite_form():
    return analyze([[1, 0], [0, -1]])


@pytest.fixture(scope="session")
def shintani(shintani_form):
    # shared with the suites module so coefficient memos are reused
    return suites._coefficients(shintani_form, 0.9, 1)


@pytest.fixture(scope="session")
def indefinite(indefinite_form):
    return suites._coefficients(indefinite_form, 1.2, 0)
