import functools

import pytest

from salemshift.algebra import IntPolynomial, find_roots
from salemshift.betashift import BetaSystem
from salemshift.coding import homoclinic
from salemshift.hofbauer import build_chain

GOLDEN = IntPolynomial((-1, -1, 1))
SALEM4 = IntPolynomial((1, -1, -1, -1, 1))
LEHMER = IntPolynomial((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))
TWO = IntPolynomial((-2, 1))
CUBE_ROOTS = IntPolynomial((1, 1, 1))

NAMED = {"golden": GOLDEN, "salem4": SALEM4, "lehmer": LEHMER, "two": TWO}


@functools.lru_cache(maxsize=None)
def roots_of(f):
    return find_roots(f)


@functools.lru_cache(maxsize=None)
def homoclinic_of(f):
    return homoclinic(f, roots_of(f))


@functools.lru_cache(maxsize=None)
def beta_of(f):
    return BetaSystem.from_polynomial(f)


@functools.lru_cache(maxsize=None)
def chain_of(f, depth=60):
    return build_chain(beta_of(f), depth)


@pytest.fixture(params=["golden", "salem4", "lehmer"])
def poly(request):
    return NAMED[request.param]


@pytest.fixture(params=["golden", "salem4", "two"])
def beta_poly(request):
    return NAMED[request.param]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
