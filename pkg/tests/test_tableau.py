import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadyn.errors import BoundaryHit, TruncationInsufficient
from quadyn.dynamics import fixed_points
from quadyn.tableau import (check_rules, compute_tableau, detect_period, nobility, tableau_from_matrix,
                            tau, vanishing_row)

from conftest import RABBIT


def test_c_minus_one_tableau(get_tableau):
    a = np.asarray(get_tableau(-1).entries)
    assert a[:, 0::2].all()
    assert not a[1:, 1::2].any()


def test_chebyshev_tableau(get_tableau):
    a = np.asarray(get_tableau(-2).entries)
    assert list(a[0, :4]) == [1, 0, 1, 1]
    assert not a[1:, 1:].any()


@pytest.mark.parametrize("c", [-1, -2, -1.75, RABBIT, 1j])
def test_first_column_all_ones(get_tableau, c):
    assert np.asarray(get_tableau(c).entries)[:, 0].all()


@pytest.mark.parametrize("c", [-1, -2, -1.75, RABBIT])
def test_rules_hold_on_computed_tableaux(get_tableau, c):
    assert check_rules(get_tableau(c)) == []


def test_rules_hold_for_non_critical_ends(get_puzzle, get_tableau):
    p = get_puzzle(-2, 11)
    T0 = get_tableau(-2)
    for x in (0.3, -1.1 + 0.2j, 1.5):
        T = compute_tableau(p, x, 12, 24)
        assert check_rules(T, T0) == []


def test_synthetic_t1_violation():
    a = np.zeros((4, 5), dtype=int)
    a[:, 0] = 1
    a[2, 3] = 1
    a[0, 3] = 1
    bad = check_rules(tableau_from_matrix(a))
    assert ("T1", 2, 3, 1) in bad


def test_synthetic_t2_violation_reported_there():
    # a_{1,2} = 1 forces a_{0,3} = a0_{0,1} = 0
    a0 = np.zeros((4, 6), dtype=int)
    a0[:, 0] = 1
    a = np.zeros((4, 6), dtype=int)
    a[0, 2] = a[1, 2] = 1
    a[0, 3] = 1
    bad = check_rules(tableau_from_matrix(a, 0.3), tableau_from_matrix(a0))
    assert bad == [("T2", 1, 2, 0, 3)]


def test_synthetic_t3_violation():
    # row 2 at column 0 ends above a 0; the next hit on the diagonal is a_{0,2},
    # so a_{1,2} = a0_{1,2} = 1 contradicts the end of the chain
    a0 = np.zeros((5, 6), dtype=int)
    a0[:, 0] = a0[:, 2] = 1
    a = np.zeros((5, 6), dtype=int)
    a[:3, 0] = 1
    a[:2, 2] = 1
    assert check_rules(tableau_from_matrix(a, 0.3), tableau_from_matrix(a0)) == [("T3", 2, 0, 2)]


def test_boundary_hit_truncates(get_puzzle):
    p = get_puzzle(-1, 3)
    alpha = fixed_points(-1)[1]
    with pytest.raises(BoundaryHit) as info:
        compute_tableau(p, alpha, 3, 4)
    assert info.value.column == 0 and info.value.tableau.truncation == (3, 0)


def test_tau_c_minus_one(get_tableau):
    T = get_tableau(-1)
    assert [tau(T, n) for n in range(2, 11)] == [n - 2 for n in range(2, 11)]


def test_tau_chebyshev_finite_image(get_tableau):
    T = get_tableau(-2)
    values = {tau(T, n) for n in range(1, 12)}
    assert values <= {-1, 0}


def test_tau_synthetic_non_recurrent():
    a = np.zeros((12, 12), dtype=int)
    a[:, 0] = 1
    T = tableau_from_matrix(a)
    assert all(tau(T, n) == -1 for n in range(1, 12))
    with pytest.raises(TruncationInsufficient):
        tau(T, 12)


def test_detect_period(get_tableau):
    assert detect_period(get_tableau(-1)) == 2
    assert detect_period(get_tableau(-1.75)) == 3
    assert detect_period(get_tableau(-2)) is None
    assert vanishing_row(get_tableau(-1), 2) == 0


def test_nobility(get_tableau):
    assert nobility(get_tableau(-1), 0)
    a = np.zeros((3, 4), dtype=int)
    a[:, 0] = 1
    a[1, 2] = 1
    a[0, 2] = 1
    assert not nobility(tableau_from_matrix(a), 1)
    b = np.zeros((3, 4), dtype=int)
    b[:, 0] = 1
    assert nobility(tableau_from_matrix(b), 1)


@st.composite
def periodic_tableaux(draw):
    """Genuine-looking tableaux of a renormalizable map: period n, full columns at multiples."""
    n = draw(st.integers(2, 5))
    rows, cols = 10, 4 * n + 1
    a = np.zeros((rows, cols), dtype=int)
    a[:, ::n] = 1
    return n, tableau_from_matrix(a)


@given(periodic_tableaux())
def test_periodic_tableaux_detected(pt):
    n, T = pt
    assert detect_period(T) == n
    assert check_rules(T) == []
    assert [tau(T, k) for k in range(n, 9)] == [k - n for k in range(n, 9)]


@given(st.integers(1, 9), st.integers(1, 20))
def test_injected_t1_violations_caught(row, col):
    a = np.zeros((10, 21), dtype=int)
    a[:, 0] = 1
    a[row, col] = 1
    bad = check_rules(tableau_from_matrix(a))
    assert any(v[0] == "T1" and v[1:3] == (row, col) for v in bad)
