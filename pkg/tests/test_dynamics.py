import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadyn.dynamics import (QuadraticParameter, classify_multiplier, classify_periodic,
                             fixed_points, iterate, iterate_map, multiplier)
from quadyn.errors import DomainError, NotPeriodic

disk2 = st.builds(lambda r, t: r * cmath.exp(1j * t),
                  st.floats(0, 2), st.floats(0, 2 * math.pi))


def test_iterate_examples():
    o = iterate(0, 2, 3)
    assert o.points == (2, 4, 16, 256)
    assert o.escaped and o.escape_index == 1
    o = iterate(-1, 0, 4)
    assert o.points == (0, -1, 0, -1, 0) and not o.escaped
    o = iterate(-2, 0, 3)
    assert o.points == (0, -2, 2, 2) and not o.escaped


def test_iterate_rejects_bad_input():
    with pytest.raises(DomainError):
        iterate(0, complex(math.nan, 0), 2)
    with pytest.raises(DomainError):
        iterate(0, 0, -1)


def test_fixed_point_examples():
    assert fixed_points(0) == (1, 0)
    beta, alpha = fixed_points(-1)
    assert abs(beta - (1 + math.sqrt(5)) / 2) < 1e-15
    assert abs(alpha - (1 - math.sqrt(5)) / 2) < 1e-15
    q = QuadraticParameter(0.25)
    assert q.beta == q.alpha == 0.5 and q.parabolic


def test_classification_examples():
    assert classify_periodic(0, 0, 1).kind == "super-attractive"
    cls = classify_periodic(-1, (1 - math.sqrt(5)) / 2, 1)
    assert cls.kind == "repelling" and abs(cls.multiplier - (1 - math.sqrt(5))) < 1e-12
    cls = classify_periodic(-2, 2, 1)
    assert cls.kind == "repelling" and cls.multiplier == 4
    assert classify_multiplier(0.5).kind == "attractive"
    assert classify_multiplier(cmath.exp(2j * math.pi / 3)).parabolic
    assert classify_multiplier(cmath.exp(2j * math.pi * (math.sqrt(5) - 1) / 2)).kind == "neutral"


def test_not_periodic():
    with pytest.raises(NotPeriodic):
        classify_periodic(-1, 0.3, 2)


@given(disk2)
def test_fixed_point_residual(c):
    for z in fixed_points(c):
        assert abs(z * z + c - z) <= 1e-12


@given(disk2)
def test_classification_matches_derivative_test(c):
    for z in fixed_points(c):
        cls = classify_periodic(c, z, 1)
        if abs(abs(2 * z) - 1) > 1e-8:
            assert cls.is_repelling == (abs(2 * z) > 1)


@given(disk2, disk2, st.integers(0, 40))
def test_recurrence_exact(c, z0, n):
    o = iterate(c, z0, n)
    pts = o.points
    for a, b in zip(pts, pts[1:]):
        if max(abs(a.real), abs(a.imag)) < 1e100:
            assert b == a * a + c
    R = max(2, abs(c)) + 1
    with np.errstate(over="ignore"):
        assert o.escaped == bool((np.abs(np.array(pts)) > R).any())


def test_iterate_map_and_multiplier():
    z = np.array([0.1, 0.2j])
    assert np.array_equal(iterate_map(-1, z, 2), (z * z - 1) ** 2 - 1)
    assert multiplier(-1, 0, 2) == 0
