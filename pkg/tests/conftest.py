import pytest
from hypothesis import settings

from regimesplit import make_family

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")

TWO_MAXIMA = {"family": "piecewise", "breaks": [-2.0, -0.1, 0.1, 2.0], "values": [0.125, 2.625, 0.125]}


@pytest.fixture(scope="session")
def std_normal():
    return make_family("gaussian")


@pytest.fixture(scope="session")
def two_maxima():
    return make_family(TWO_MAXIMA)
