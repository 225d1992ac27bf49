import pytest

from zetamoments import zeros


@pytest.fixture(scope="session")
def cache100():
    return zeros.sweep(100.0)


@pytest.fixture(scope="session")
def cache1000():
    return zeros.sweep(1000.0)


@pytest.fixture(scope="session")
def cache10k():
    return zeros.sweep(10000.0)
