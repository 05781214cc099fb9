import pytest

from polytoep.poly import exact_poly, symbols


def p2(terms):
    return exact_poly(2, terms)


def p1(terms):
    return exact_poly(1, terms)


@pytest.fixture
def z1():
    return p2({(1, 0): 1})


@pytest.fixture
def z2():
    return p2({(0, 1): 1})


@pytest.fixture
def shift_pair(z1, z2):
    return symbols(2, z1, z2)


@pytest.fixture
def monomial_pair():
    # (z1^2, z2^3), index -6
    return symbols(2, p2({(2, 0): 1}), p2({(0, 3): 1}))


@pytest.fixture
def quarter_pair(z2):
    # (z1^2 - 1/4, z2): zeros at (±1/2, 0), index -2
    return symbols(2, p2({(2, 0): 1, (0, 0): "-1/4"}), z2)


@pytest.fixture
def repeated_pair(z1):
    # (z1, z1) is never Fredholm: the symbols vanish together on {z1=0}
    return symbols(2, z1, z1)


@pytest.fixture
def shared_line_pair():
    # (z1 z2, z1 (z2 - 2)): common factor z1 vanishes inside the polydisc
    return symbols(2, p2({(1, 1): 1}), p2({(1, 1): 1, (1, 0): -2}))
