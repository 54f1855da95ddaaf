# tests/conftest.py
import pytest

from epl.pade import draw_pade_params
from epl.painleve import solve_pade_pair, surface_from_pade
from epl.special_functions import Bases
from epl.utils import make_rng

P_BASE = 0.08 + 0.03j
Q_BASE = 0.45 + 0.15j
GAUGE = (1.1 + 0.2j, 0.9 - 0.3j, 1.05 + 0.35j, 0.85 - 0.15j)


@pytest.fixture
def bases():
    return Bases.create(P_BASE, Q_BASE, precision_bits=53)


@pytest.fixture
def rng():
    return make_rng(20240611)


@pytest.fixture
def gauge(bases):
    return tuple(bases.scalar(c) for c in GAUGE)


@pytest.fixture
def params11(bases):
    return draw_pade_params(make_rng(11), 1, 1, bases)


@pytest.fixture
def params12(bases):
    return draw_pade_params(make_rng(12), 1, 2, bases)


@pytest.fixture
def surface12(params12, gauge, bases):
    return surface_from_pade(params12, gauge, bases)


@pytest.fixture
def solution11(params11, bases):
    return solve_pade_pair(params11, bases)
