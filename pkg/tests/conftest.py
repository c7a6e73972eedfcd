import pytest

from ratpert import MapSpec, iterate_orbit


@pytest.fixture(scope="session")
def chebyshev_map():
    return MapSpec.unicritical(2, -2)


@pytest.fixture(scope="session")
def chebyshev_orbit(chebyshev_map):
    # orbit 0, -2, 2, 2, ...; cocycle 1, -4, -16, ...; the canonical
    # closed-form test case (geometric everything)
    return iterate_orbit(chebyshev_map, 0j, n_max=300, escape_radius=10.0)


@pytest.fixture(scope="session")
def squaring_map():
    return MapSpec.unicritical(2, 0)
