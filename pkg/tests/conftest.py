import pytest

from primefock.numtheory import TruncationSpec, enumerate_basis


@pytest.fixture(scope="session")
def small_basis():
    # 210 labels; guard-1 interior is wide enough for quadratic identities
    return enumerate_basis(TruncationSpec(p_max=13, a_max=4, omega_max=4))


@pytest.fixture(scope="session")
def medium_basis():
    return enumerate_basis(TruncationSpec(p_max=31, a_max=6, omega_max=6))


@pytest.fixture(scope="session")
def eigen_basis():
    # equal caps: the total-occupation boundary dominates the residual mass
    return enumerate_basis(TruncationSpec(p_max=23, a_max=8, omega_max=8))


@pytest.fixture(scope="session")
def mass_basis():
    return enumerate_basis(TruncationSpec(p_max=53, a_max=6, omega_max=6))
