"""Tableaux of puzzle ends: rules T1-T3, the tau function, nobility, periodicity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryHit, TruncationInsufficient
from .potential import green
from .puzzle import OnBoundary, Puzzle, critical_membership


@dataclass(frozen=True)
class Tableau:
    x: complex
    entries: np.ndarray       # rows = depth n, columns = iterate m
    is_critical: bool

    @property
    def truncation(self) -> tuple:
        return self.entries.shape

    def __getitem__(self, nm):
        return int(self.entries[nm])

    def __eq__(self, other):
        return (isinstance(other, Tableau) and self.x == other.x
                and self.is_critical == other.is_critical
                and np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash((self.x, self.is_critical, self.entries.tobytes()))


def tableau_from_matrix(entries, x: complex = 0j) -> Tableau:
    """Wrap an explicit 0/1 matrix (synthetic tableaux, imports)."""
    a = np.array(entries, dtype=np.uint8)
    if a.ndim != 2 or not np.isin(a, (0, 1)).all():
        raise ValueError("tableau entries must be a 2-D 0/1 matrix")
    a.setflags(write=False)
    return Tableau(complex(x), a, complex(x) == 0)


def compute_tableau(p: Puzzle, x: complex, N: int, M: int) -> Tableau:
    """Tableau of the x-end truncated to N rows (depths 0..N-1) and M columns.

    Entry (n, m) is 1 when P^m(x) lies in the critical piece C_n.  An orbit
    point within the boundary tolerance of C_n aborts with BoundaryHit
    carrying the tableau truncated before that column.
    """
    if N - 1 > p.max_depth:
        raise TruncationInsufficient(f"{N} rows need puzzle depth {N - 1}, have {p.max_depth}")
    x = complex(x)
    a = np.zeros((N, M), dtype=np.uint8)
    z = x
    for m in range(M):
        g = green(p.c, z)
        for n in range(N):
            if g > p.g_level(n):
                break
            hit = critical_membership(p, z, n)
            if hit is OnBoundary:
                err = BoundaryHit(m, z)
                err.tableau = tableau_from_matrix(a[:, :m], x)
                raise err
            a[n, m] = 1 if hit else 0
        z = z * z + p.c
    a.setflags(write=False)
    return Tableau(x, a, x == 0)


def check_rules(T: Tableau, T0: Tableau | None = None) -> list:
    """All violated instances of T1, T2, T3 within the common truncation.

    Each violation is a tuple (rule, indices...).  T0 defaults to T itself
    (the critical tableau checked against itself).
    """
    a = np.asarray(T.entries)
    a0 = np.asarray((T0 if T0 is not None else T).entries)
    N, M = a.shape
    N0, M0 = a0.shape
    out = []
    for n in range(N):
        for m in range(M):
            if not a[n, m]:
                continue
            # T1: the column is 1 above a 1
            for i in range(n):
                if not a[i, m]:
                    out.append(("T1", n, m, i))
            # T2: a_{r(m+j)} = a0_{rj} whenever r + j <= n (P^j maps C_n into C_{n-j})
            for r in range(n + 1):
                for j in range(n - r + 1):
                    col = m + j
                    if col >= M or j >= M0 or r >= N0:
                        continue
                    if a[r, col] != a0[r, j]:
                        out.append(("T2", n, m, r, col))
            # T3
            if n + 1 >= N or a[n + 1, m]:
                continue
            for i in range(1, n + 1):
                if m + i >= M:
                    break
                if a[n - i, m + i]:
                    r = n - i + 1
                    if i < M0 and r < N0 and a0[r, i] and a[r, m + i]:
                        out.append(("T3", n, m, i))
                    break
    # T2 reports the same cell from several anchors; keep one per cell
    seen, unique = set(), []
    for v in out:
        key = v if v[0] != "T2" else ("T2", v[3], v[4])
        if key not in seen:
            seen.add(key)
            unique.append(v)
    return unique


def tau(T0: Tableau, n: int) -> int:
    """tau(n) = n - i for the first i in 1..n with a0[n-i, i] = 1, else -1."""
    a = np.asarray(T0.entries)
    N, M = a.shape
    if n < 1:
        return -1
    if n - 1 >= N or n >= M:
        raise TruncationInsufficient(f"tau({n}) needs rows < {n} and columns <= {n}; have {N}x{M}")
    for i in range(1, n + 1):
        if a[n - i, i]:
            return n - i
    return -1


def detect_period(T0: Tableau):
    """Smallest m > 0 whose column is all 1 within the truncation, or None.

    The candidate is accepted only when every multiple of m inside the
    truncation is also a full column and every other column has vanished at
    the deepest stored row; otherwise the truncation cannot tell and None is
    returned.  This is numerical evidence relative to the truncation.
    """
    a = np.asarray(T0.entries)
    N, M = a.shape
    full = a.all(axis=0)
    for m in range(1, M):
        if not full[m]:
            continue
        if 2 * m > M - 1:
            return None
        multiples = np.arange(m, M, m)
        if not full[multiples].all():
            return None
        others = [j for j in range(1, M) if j % m]
        if others and a[N - 1, others].any():
            return None
        return m
    return None


def vanishing_row(T0: Tableau, n1: int):
    """First row from which all columns 0 < j < n1 are zero (the N of the period)."""
    a = np.asarray(T0.entries)
    N = a.shape[0]
    for r in range(N):
        if not a[r:, 1:n1].any():
            return r
    return None


def nobility(T0: Tableau, n: int) -> bool:
    """n is noble when every 1 in row n sits above a 1 in row n+1."""
    a = np.asarray(T0.entries)
    if n + 1 >= a.shape[0]:
        raise TruncationInsufficient(f"nobility of row {n} needs row {n + 1}")
    ones = a[n] == 1
    return bool(np.all(a[n + 1][ones] == 1))
