import numpy as np
import pytest

from gowersap.arithfn import sieve_liouville, sieve_mobius, unit_table


@pytest.fixture(scope="session")
def mu():
    return sieve_mobius(10**5)


@pytest.fixture(scope="session")
def lam():
    return sieve_liouville(10**5)


@pytest.fixture(scope="session")
def unit():
    return unit_table(10**5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
