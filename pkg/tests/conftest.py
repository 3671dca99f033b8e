import functools

import pytest
from hypothesis import HealthCheck, settings

from quadyn.puzzle import build_puzzle
from quadyn.tableau import compute_tableau

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

RABBIT = -0.1225611668766536 + 0.7448617666197442j
C_FEIGENBAUM = -1.4011551890920511
TEST_PARAMETERS = (0j, -1 + 0j, -2 + 0j, 1j, RABBIT)


@functools.lru_cache(maxsize=None)
def puzzle(c, depth):
    return build_puzzle(complex(c), depth)


@functools.lru_cache(maxsize=None)
def critical_tableau(c, rows=12, cols=24):
    return compute_tableau(puzzle(complex(c), rows - 1), 0j, rows, cols)


@pytest.fixture(scope="session")
def get_puzzle():
    return puzzle


@pytest.fixture(scope="session")
def get_tableau():
    return critical_tableau
