"""Parameter space: Misiurewicz points, superstable centers, the Feigenbaum
point and scans for renormalization windows."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .dynamics import multiplier
from .errors import DomainError, NewtonFailed, NotMinimal, NotRepelling, QuadynError
from .potential import green
from .puzzle import build_puzzle
from .tableau import compute_tableau, detect_period

RESIDUAL_TOL = 1e-10
NEWTON_MAXIT = 200
MAX_HALVINGS = 20
ORBIT_MATCH_TOL = 1e-7
FEIGENBAUM_DELTA = 4.669201609102990


@dataclass(frozen=True)
class MisiurewiczPoint:
    c: complex
    preperiod: int
    period: int
    multiplier: complex
    residual: float


def _critical_orbit(c, n):
    """Critical orbit z_0..z_n and the derivatives dz_j/dc."""
    z, dz = 0j, 0j
    zs, dzs = [z], [dz]
    for _ in range(n):
        z, dz = z * z + c, 2 * z * dz + 1
        zs.append(z)
        dzs.append(dz)
    return zs, dzs


def _newton(F, seed, maxit=NEWTON_MAXIT):
    """Damped Newton for a scalar holomorphic F returning (value, derivative)."""
    c = complex(seed)
    f, df = F(c)
    for _ in range(maxit):
        if not np.isfinite(f) or df == 0:
            raise NewtonFailed(f"Newton broke down at c={c!r}")
        step = f / df
        for _ in range(MAX_HALVINGS + 1):
            c_new = c - step
            f_new, df_new = F(c_new)
            if np.isfinite(f_new) and abs(f_new) < abs(f):
                break
            step /= 2
        else:
            break
        c, f, df = c_new, f_new, df_new
        # polish while the residual keeps dropping: representable roots come out exact
        if f == 0 or abs(step) <= 1e-17 * max(1.0, abs(c)):
            break
    if not abs(f) <= RESIDUAL_TOL:
        raise NewtonFailed(f"Newton stalled at c={c!r} with residual {abs(f):.3g}")
    return c, abs(f)


def _minimal_pair(c, m, k):
    """True (preperiod, period) of the critical orbit, assuming it is preperiodic."""
    zs, _ = _critical_orbit(c, m + 2 * k + 1)
    p = zs[m]
    scale = max(1.0, abs(p))
    k_min = next(d for d in range(1, k + 1)
                 if abs(zs[m + d] - p) <= ORBIT_MATCH_TOL * scale)
    m_min = next(j for j in range(m + 1)
                 if abs(zs[j + k_min] - zs[j]) <= ORBIT_MATCH_TOL * scale)
    return m_min, k_min


def find_misiurewicz(seed: complex, m: int, k: int) -> MisiurewiczPoint:
    """Root of P_c^{m+k}(0) = P_c^m(0) near seed, validated as a Misiurewicz point."""
    if m < 1 or k < 1:
        raise DomainError("preperiod and period must be >= 1")

    def F(c):
        zs, dzs = _critical_orbit(c, m + k)
        return zs[m + k] - zs[m], dzs[m + k] - dzs[m]

    c, res = _newton(F, seed)
    zs, _ = _critical_orbit(c, m)
    lam = multiplier(c, zs[m], k)
    if abs(lam) <= 1.0:
        raise NotRepelling(c, lam)
    pair = _minimal_pair(c, m, k)
    if pair != (m, k):
        raise NotMinimal(c, pair)
    return MisiurewiczPoint(c, m, k, lam, res)


def find_superstable(n: int, seed: complex) -> complex:
    """Center c of a hyperbolic component of period n: P_c^n(0) = 0 with n minimal."""
    if n < 1:
        raise DomainError("period must be >= 1")

    def F(c):
        zs, dzs = _critical_orbit(c, n)
        return zs[n], dzs[n]

    c, _ = _newton(F, seed)
    zs, _ = _critical_orbit(c, n)
    for d in range(1, n):
        if n % d == 0 and abs(zs[d]) <= ORBIT_MATCH_TOL:
            raise NotMinimal(c, d)
    if abs(c.imag) < 1e-14:
        c = complex(c.real, 0.0)
    return c


@dataclass(frozen=True)
class FeigenbaumPoint:
    c: float
    centers: tuple            # s_1 .. s_K, the period-2^k centers
    ratios: tuple             # (s_{k-1} - s_k) / (s_k - s_{k+1})
    last_center_error: float  # |s_K - c|

    def __float__(self):
        return self.c


def find_feigenbaum(levels: int = 12) -> FeigenbaumPoint:
    """Limit of the real period-doubling centers, Aitken-accelerated."""
    s = [find_superstable(2, -0.9).real, find_superstable(4, -1.31).real]
    for k in range(3, levels + 1):
        guess = s[-1] + (s[-1] - s[-2]) / FEIGENBAUM_DELTA
        s.append(find_superstable(2 ** k, guess).real)
    d = np.diff(s)
    ratios = tuple(float(d[i] / d[i + 1]) for i in range(len(d) - 1))
    a, b, c = s[-3], s[-2], s[-1]
    denom = (c - b) - (b - a)
    limit = c - (c - b) ** 2 / denom if denom != 0 else c
    return FeigenbaumPoint(float(limit), tuple(s), ratios, abs(s[-1] - limit))


@dataclass(frozen=True)
class WindowCell:
    c: complex
    period: int | None
    truncation: tuple | None
    error: str | None = None


@dataclass(frozen=True)
class WindowCluster:
    cells: tuple               # indices into WindowScan.cells
    center: complex | None     # superstable center found inside, if any
    validated: bool


@dataclass(frozen=True)
class WindowScan:
    center: complex
    corner: complex
    size: tuple
    grid: tuple
    target_period: int
    cells: tuple
    clusters: tuple = field(default=())


def _cell_period(c, depth, columns):
    if green(c, 0j) > 0:
        raise DomainError("critical point escapes")
    p = build_puzzle(c, depth)
    T = compute_tableau(p, 0j, depth + 1, columns)
    return detect_period(T)


def scan_windows(c0, box, grid, target_period: int, depth: int = 8,
                 columns: int | None = None) -> WindowScan:
    """Tableau-period detection over a grid of cell centers in a parameter box.

    ``box`` is (corner, (width, height)); ``grid`` is (nx, ny).  Cells whose
    detected period equals ``target_period`` are grouped into 4-connected
    clusters and each cluster is validated by a superstable center of that
    period found from the cluster's mean parameter.
    """
    center = complex(getattr(c0, "c", c0))
    corner, (w, h) = complex(box[0]), box[1]
    nx, ny = grid
    if columns is None:
        columns = 4 * target_period + 1
    for z in (corner, corner + w, corner + 1j * h, corner + w + 1j * h):
        if abs(z) > 2 + 1e-12:
            raise DomainError("scan box must lie within |c| <= 2")
    if w <= 0 or h < 0 or nx <= 0 or ny <= 0:
        return WindowScan(center, corner, (w, h), (nx, ny), target_period, ())
    cells = []
    hit = np.zeros((ny, nx), dtype=bool)
    for j in range(ny):
        for i in range(nx):
            c = corner + (i + 0.5) * w / nx + 1j * (j + 0.5) * h / ny
            try:
                period = _cell_period(c, depth, columns)
                cells.append(WindowCell(c, period, (depth + 1, columns)))
            except QuadynError as err:
                cells.append(WindowCell(c, None, None, f"{type(err).__name__}: {err}"))
                continue
            hit[j, i] = period == target_period
    labels, count = ndimage.label(hit)
    clusters = []
    dx, dy = w / nx, (h / ny if h > 0 else 0.0)
    for lab in range(1, count + 1):
        idx = tuple(int(j * nx + i) for j, i in zip(*np.nonzero(labels == lab)))
        cs = np.array([cells[t].c for t in idx])
        found = None
        try:
            found = find_superstable(target_period, cs.mean())
        except QuadynError:
            pass
        ok = False
        if found is not None:
            ok = bool(cs.real.min() - dx <= found.real <= cs.real.max() + dx
                      and cs.imag.min() - dy - 1e-12 <= found.imag <= cs.imag.max() + dy + 1e-12)
        clusters.append(WindowCluster(idx, found, ok))
    return WindowScan(center, corner, (w, h), (nx, ny), target_period, tuple(cells), tuple(clusters))
