"""Renormalization: restrictive intervals on the real line, periodic critical
tableaux of nested puzzles, cascades and measured bounds."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import ndimage, optimize
from shapely.geometry import Point, Polygon
from shapely.ops import unary_union

from . import _rays
from .dynamics import fixed_points, iterate_map, multiplier
from .errors import (CascadeTooShallow, DomainError, EmptyCascade, NoCycleFound,
                     QuadynError, RealInput, TruncationInsufficient)
from .modulus import (AnnulusEstimate, PolygonRegion, PullbackRegion, annulus_modulus,
                      make_grid)
from .puzzle import Puzzle, build_puzzle, real_cycle_angles
from .tableau import compute_tableau, detect_period, vanishing_row

REAL_SAMPLES = 1 << 18
BISECT_TOL = 1e-12
CONTAIN_TOL = 1e-9
DISJOINT_TOL = 1e-12
TANGENT_PROBE = 1e3     # |f| threshold, in grid spacings, for probing a tangency
TANGENT_TOL = 1e-12
PARABOLIC_TOL = 1e-5
C_MIN, C_MAX = -2.0, 0.25


# ----- real line ------------------------------------------------------------

def _check_real(c):
    c = complex(c)
    if abs(c.imag) > 0:
        raise RealInput(f"c={c!r} is not real")
    c = c.real
    if not C_MIN <= c <= C_MAX:
        raise DomainError(f"c={c} outside [-2, 1/4]")
    return c


def _real_iterate(c, x, n):
    for _ in range(n):
        x = x * x + c
    return x


def real_fixed_points(c: float, n: int, lo: float, hi: float,
                      samples: int = REAL_SAMPLES) -> np.ndarray:
    """Fixed points of P^n in [lo, hi]: sign changes on a dense grid, then bisection."""
    x = np.linspace(lo, hi, samples)
    f = _real_iterate(c, x, n) - x
    idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)[0]
    a, b = x[idx], x[idx + 1]
    fa = f[idx]
    while a.size and np.max(b - a) > BISECT_TOL:
        m = 0.5 * (a + b)
        fm = _real_iterate(c, m, n) - m
        left = np.sign(fa) * np.sign(fm) <= 0
        b = np.where(left, m, b)
        a = np.where(left, a, m)
        fa = np.where(left, fa, fm)
    roots = 0.5 * (a + b)
    # tangential (even multiplicity) roots show up as small local minima of |f|
    af = np.abs(f)
    k = np.nonzero((af[1:-1] <= af[:-2]) & (af[1:-1] <= af[2:])
                   & (af[1:-1] < TANGENT_PROBE * (hi - lo) / samples))[0] + 1
    extra = []
    for j in k:
        res = optimize.minimize_scalar(
            lambda t: abs(_real_iterate(c, t, n) - t), bounds=(x[j - 1], x[j + 1]),
            method="bounded", options={"xatol": BISECT_TOL})
        if res.fun < TANGENT_TOL:
            extra.append(res.x)
    roots = np.sort(np.concatenate([roots, extra]))
    if roots.size:
        keep = np.ones(roots.size, dtype=bool)
        keep[1:] = np.diff(roots) > 10 * BISECT_TOL
        roots = roots[keep]
    return roots


def interval_image(c: float, lo: float, hi: float) -> tuple:
    """Exact image of [lo, hi] under x**2 + c."""
    if lo <= 0.0 <= hi:
        return (c, max(lo * lo, hi * hi) + c)
    a, b = lo * lo + c, hi * hi + c
    return (min(a, b), max(a, b))


def _orbit_intervals(c, a, n):
    out = [(-a, a)]
    for _ in range(n):
        out.append(interval_image(c, *out[-1]))
    return out


@dataclass(frozen=True)
class RealRenormalizationRecord:
    """A restrictive interval I = [-a, a] of P^n (x coordinates).

    ``normalized`` rescales by u = -x / beta, in which the folding map has
    its maximum at 0 and sends both ends of [-1, 1] to -1.
    """
    c: float
    period: int                 # relative period n of this level
    cumulative: int             # m = product of the periods so far
    a: float
    beta: float
    endpoint: float             # the P^m-fixed point at -a or a
    alpha: float | None         # the other P^m-fixed point inside I
    images: tuple               # P^i(I) for 0 <= i < m
    margins: tuple              # gap from each P^i(I) to its nearest neighbour
    containment_margin: float   # distance of P^m(I) from the ends of I (>= -tol)

    @property
    def interval(self) -> tuple:
        return (-self.a, self.a)

    @property
    def normalized(self) -> tuple:
        return (-self.a / self.beta, self.a / self.beta)

    def normalized_images(self) -> tuple:
        return tuple((-hi / self.beta, -lo / self.beta) for lo, hi in self.images)


def _interior_fixed(c, m, a):
    pts = real_fixed_points(c, m, -a, a)
    return [float(x) for x in pts if abs(x) < a * (1 - 1e-9) - 1e3 * BISECT_TOL]


def restrictive_interval(c: float, m: int, a_max: float, period: int | None = None):
    """Maximal I = [-a, a] with a < a_max restrictive for P^m, or None."""
    pts = real_fixed_points(c, m, -a_max, a_max)
    cands = sorted({abs(x) for x in pts if abs(x) < a_max * (1 - 1e-9)}, reverse=True)
    for a in cands:
        if a <= 0:
            continue
        ims = _orbit_intervals(c, a, m)
        lo, hi = ims[m]
        slack = CONTAIN_TOL * max(1.0, a)
        if lo < -a - slack or hi > a + slack:
            continue
        srt = sorted(ims[:m])
        if any(srt[j + 1][0] < srt[j][1] - DISJOINT_TOL for j in range(m - 1)):
            continue
        x = a if abs(_real_iterate(c, a, m) - a) < abs(_real_iterate(c, -a, m) + a) else -a
        # exactly two fixed points of P^m in I: the endpoint and alpha, which
        # merge when the endpoint is parabolic
        lam = multiplier(c, x, m).real
        inner = _interior_fixed(c, m, a)
        if not ((abs(lam) > 1.0 and len(inner) == 1)
                or (abs(lam - 1.0) < PARABOLIC_TOL and len(inner) <= 1)):
            continue
        margins = []
        for i, (l0, h0) in enumerate(ims[:m]):
            gaps = [max(l1 - h0, l0 - h1) for j, (l1, h1) in enumerate(ims[:m]) if j != i]
            margins.append(min(gaps) if gaps else math.inf)
        beta = fixed_points(c)[0].real
        return RealRenormalizationRecord(
            c, period or m, m, float(a), beta, float(x), inner[0] if inner else None,
            tuple(ims[:m]), tuple(margins), min(lo + a, a - hi))
    return None


def real_renorm_detect(c: float, n_max: int = 16):
    """Smallest n in 2..n_max with a restrictive interval for P^n, or None."""
    c = _check_real(c)
    beta = fixed_points(c)[0].real
    for n in range(2, n_max + 1):
        rec = restrictive_interval(c, n, beta)
        if rec is not None:
            return rec
    return None


def real_renorm_cascade(c: float, k_max: int, n_max: int = 8) -> list:
    """Nested restrictive intervals I_1 ⊃ I_2 ⊃ ... with periods m_k = n_1 ... n_k."""
    c = _check_real(c)
    a, m = fixed_points(c)[0].real, 1
    out = []
    for _ in range(k_max):
        for n in range(2, n_max + 1):
            rec = restrictive_interval(c, m * n, a, period=n)
            if rec is not None:
                break
        else:
            break
        out.append(rec)
        a, m = rec.a, rec.cumulative
    return out


@dataclass(frozen=True)
class RatioRow:
    i: int
    length: float
    left: float       # |L+|
    right: float      # |R+|

    @property
    def ratio(self) -> float:
        return min(self.left, self.right) / self.length


@dataclass(frozen=True)
class RatioTable:
    c: float
    level: int
    period: int
    I_rows: tuple
    J_rows: tuple

    @property
    def min_I(self) -> float:
        return min(r.ratio for r in self.I_rows)

    @property
    def min_J(self) -> float:
        return min(r.ratio for r in self.J_rows)

    @property
    def minimum(self) -> float:
        return min(self.min_I, self.min_J)

    def rows(self):
        """(family, i, length, left, right, ratio) tuples."""
        for fam, rows in (("I", self.I_rows), ("J", self.J_rows)):
            for r in rows:
                yield (fam, r.i, r.length, r.left, r.right, r.ratio)


def _adjacency_rows(intervals):
    """|L+| and |R+| for each interval of a disjoint family inside [-1, 1].

    A missing neighbour on one side is replaced by the end of [-1, 1].
    """
    order = sorted(range(len(intervals)), key=lambda i: intervals[i][0])
    rows = [None] * len(intervals)
    for pos, i in enumerate(order):
        lo, hi = intervals[i]
        left_end = intervals[order[pos - 1]][0] if pos > 0 else -1.0
        right_end = intervals[order[pos + 1]][1] if pos + 1 < len(order) else 1.0
        rows[i] = RatioRow(i, float(hi - lo), float(lo - left_end), float(right_end - hi))
    return tuple(rows)


def real_bounds_report(c: float, k: int) -> RatioTable:
    """Ratios min{|L+|, |R+|} / |.| for the families I_k(i) and J_k(i)."""
    c = _check_real(c)
    if k < 1:
        raise DomainError("level k must be >= 1")
    cascade = real_renorm_cascade(c, k)
    if len(cascade) < k:
        raise CascadeTooShallow(f"real cascade of c={c} has depth {len(cascade)} < {k}")
    rec = cascade[k - 1]
    m = rec.cumulative
    I = [tuple(sorted(iv)) for iv in rec.normalized_images()]
    crit = [-_real_iterate(c, 0.0, i) / rec.beta for i in range(2 * m)]
    J = [tuple(sorted((crit[i], crit[m + i]))) for i in range(m)]
    return RatioTable(c, k, m, _adjacency_rows(I), _adjacency_rows(J))


# ----- puzzles, cascades and annuli -----------------------------------------

LEVEL_DEPTH = 4           # depth of the puzzles built at alpha_i, i >= 1
BASE_DEPTH = 8            # depth of the ordinary puzzle opening a cascade
MIN_COLUMNS = 24
FIXED_TOL = 1e-8
THICKEN_EXTRA = 2         # the thickened annulus sits this many levels below N
THICKEN_EPS = 0.3         # opening of the tapered ray neighbourhoods
THICKEN_REACH = 2.0       # taper length in units of the inner rays' reach
DEFAULT_J_MAX = 200
ANNULUS_RESOLUTION = 256
MAX_RAY_ANGLES = 1 << 14


@dataclass
class RenormalizationLevel:
    """The i-th renormalization P^{m_i} : C_{N+m_i} -> C_N.

    ``puzzle`` is the puzzle the period was read from (cut by rays at the
    orbit of ``base_point``, the separating fixed point of the previous
    level; the ordinary alpha for i = 1).  ``annulus`` is mod(C_N minus
    C_{N+m_i}), recorded as 0 with ``degenerate`` set when the two pieces
    share boundary points.
    """
    index: int
    period: int
    cumulative: int
    N: int
    puzzle: object
    tableau: object
    base_point: complex
    outer: object                 # the piece C_N
    annulus: object               # AnnulusEstimate
    shared_vertices: tuple = ()

    @property
    def c(self) -> complex:
        return self.puzzle.c

    @property
    def degenerate(self) -> bool:
        return bool(self.shared_vertices)

    @property
    def domain_depth(self) -> int:
        return self.N + self.cumulative

    def outer_region(self):
        return PolygonRegion(self.puzzle.boundary(self.outer))

    def domain(self):
        """C_{N+m_i} as the component of P^{-m_i}(C_N) containing 0."""
        return PullbackRegion(self.c, self.cumulative, self.outer_region())

    def return_map(self, z):
        return iterate_map(self.c, z, self.cumulative)


def _base_period(p) -> int:
    return p.vertex_count(0)


def _touches(mask, grid, v, radius=2.5):
    k = int(round((v.imag - grid.y0) / grid.h))
    j = int(round((v.real - grid.x0) / grid.h))
    r = int(math.ceil(radius))
    sub = mask[max(0, k - r):k + r + 1, max(0, j - r):j + r + 1]
    return bool(sub.any())


def _shared_vertices(c, outer_piece, U, grid, m):
    """Vertices of C_N on the boundary of C_{N+m} (and their symmetric partners)."""
    verts = outer_piece.vertex_set
    mask = U.mask(grid)
    fixed = [v for v in verts
             if abs(iterate_map(c, v, m) - v) < FIXED_TOL and _touches(mask, grid, v)]
    return tuple(w for w in verts
                 if any(abs(iterate_map(c, w, m) - v) < FIXED_TOL for v in fixed))


def renormalize(c: complex, p, columns: int | None = None,
                resolution: int = ANNULUS_RESOLUTION, refine: bool = True,
                index: int = 1, base_point=None):
    """Detect a periodic critical tableau on puzzle p and assemble the level."""

    c = complex(c)
    if abs(c - p.c) > 0:
        raise DomainError("puzzle was built for a different parameter")
    m_prev = _base_period(p)
    if columns is None:
        columns = max(MIN_COLUMNS, 8 * m_prev + 1)
    T = compute_tableau(p, 0j, p.max_depth + 1, columns)
    m = detect_period(T)
    if m is None:
        return None
    N = vanishing_row(T, m)
    if N is None:
        raise TruncationInsufficient("columns below the period never vanish within the truncation")
    outer = p.critical(N)
    V = PolygonRegion(p.boundary(outer))
    U = PullbackRegion(c, m, V)
    shared = _shared_vertices(c, outer, U, make_grid(V.bbox, resolution), m)
    if shared:
        ann = AnnulusEstimate(0.0, resolution, 0.0, 0.0, 0.0, True, (N, outer.id), (N + m, 0))
    else:
        ann = annulus_modulus(V, U, resolution, refine, (N, outer.id), (N + m, 0),
                              check_nesting=False)
    if base_point is None:
        base_point = fixed_points(c)[1] if m_prev == 1 else None
    return RenormalizationLevel(index, m // m_prev, m, N, p, T, base_point, outer, ann, shared)


@dataclass
class Cascade:
    c: complex
    levels: list = field(default_factory=list)
    stop_reason: str = ""
    errors: list = field(default_factory=list)     # (level index, exception)

    @property
    def periods(self) -> list:
        return [lv.period for lv in self.levels]

    @property
    def cumulative(self) -> list:
        return [lv.cumulative for lv in self.levels]

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, i):
        return self.levels[i]


def _newton_fixed(c, z, m, maxit=60):
    for _ in range(maxit):
        w, dw = z, 1 + 0j
        for _ in range(m):
            dw = 2 * w * dw
            w = w * w + c
        if not cmath.isfinite(w) or dw == 1:
            return None
        step = (w - z) / (dw - 1)
        z -= step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    return z if abs(iterate_map(c, z, m) - z) < FIXED_TOL else None


def _landing_angles(c, z, m):
    """Rational angles of period dividing m*q (q <= 3) whose rays land at z."""
    for q in (1, 2, 3):
        den = 2 ** (m * q) - 1
        if den > MAX_RAY_ANGLES:
            break
        angles = [Fraction(a, den) for a in range(den)]
        bundle = _rays.trace_rational(c, angles)
        land = bundle.landing[: len(angles)]
        hit = [a for a, L in zip(angles, land) if np.isfinite(L) and abs(L - z) < 1e-6]
        if hit:
            return hit
    return []


def _complex_alpha(c, level):
    """The separating fixed point of the level's return map (non-real c)."""
    m = level.cumulative
    V = level.outer_region()
    U = level.domain()
    x0, x1, y0, y1 = V.bbox
    seeds = (np.linspace(x0, x1, 24)[None, :] + 1j * np.linspace(y0, y1, 24)[:, None]).ravel()
    found = []
    for s in seeds:
        z = _newton_fixed(c, complex(s), m)
        if z is None or not U.contains(np.array([z]))[0]:
            continue
        if all(abs(z - f) > 1e-8 for f in found):
            found.append(z)
    attracting = [z for z in found if abs(multiplier(c, z, m)) <= 1]
    if attracting:
        return attracting[0]
    for z in found:
        rays = _landing_angles(c, z, m)
        if len(rays) >= 2 and any((a * 2 ** m) % 1 != a for a in rays):
            return z
    raise NoCycleFound(f"no separating fixed point of P^{m} found in the domain piece")


def _level_puzzle(c, alpha, m, depth):
    orbit = [iterate_map(c, complex(alpha), k) for k in range(m)]
    if abs(complex(c).imag) == 0 and all(abs(z.imag) < 1e-12 for z in orbit):
        angles = real_cycle_angles(complex(c).real, complex(alpha).real, m)
    else:
        angles = set()
        for z in orbit:
            angles.update(_landing_angles(c, z, m))
        if not angles:
                    raise NoCycleFound("no rays found at the renormalized alpha")
    return Puzzle(c, sorted(angles), depth, base_points=orbit)


def renorm_cascade(c: complex, k_max: int = 4, base_depth: int = BASE_DEPTH,
                   level_depth: int = LEVEL_DEPTH, resolution: int = ANNULUS_RESOLUTION,
                   refine: bool = True) -> Cascade:
    """Repeated detection on puzzles built at alpha_0, alpha_1, ... (original coordinate)."""
    c = complex(c)
    out = Cascade(c)
    real_levels, alpha = None, None
    try:
        p = build_puzzle(c, base_depth)
    except QuadynError as err:
        out.errors.append((1, err))
        out.stop_reason = f"no puzzle: {err}"
        return out
    for i in range(1, k_max + 1):
        try:
            lv = renormalize(c, p, resolution=resolution, refine=refine, index=i,
                             base_point=alpha)
        except QuadynError as err:
            out.errors.append((i, err))
            out.stop_reason = f"level {i}: {type(err).__name__}: {err}"
            break
        if lv is None:
            out.stop_reason = f"level {i}: no periodic column in the critical tableau"
            break
        out.levels.append(lv)
        if i == k_max:
            out.stop_reason = "k_max reached"
            break
        m = lv.cumulative
        try:
            if c.imag == 0 and C_MIN <= c.real <= C_MAX:
                if real_levels is None:
                    real_levels = real_renorm_cascade(c.real, k_max)
                match = [r for r in real_levels if r.cumulative == m]
                if not match:
                    raise CascadeTooShallow(f"no real restrictive interval of period {m}")
                alpha = match[0].alpha
                if alpha is None:
                    out.stop_reason = f"level {i}: parabolic return map, alpha_{i} not repelling"
                    break
            else:
                alpha = _complex_alpha(c, lv)
            if abs(multiplier(c, alpha, m)) <= 1.0:
                out.stop_reason = f"level {i}: renormalized dynamics attracting, alpha_{i} not repelling"
                break
            p = _level_puzzle(c, alpha, m, level_depth)
        except QuadynError as err:
            out.errors.append((i + 1, err))
            out.stop_reason = f"level {i + 1}: {type(err).__name__}: {err}"
            break
    return out


def critical_orbit(c: complex, n: int) -> np.ndarray:
    """c(0) = 0, c(1), ..., c(n)."""
    out = np.empty(n + 1, dtype=complex)
    z = 0j
    for j in range(n + 1):
        out[j] = z
        z = z * z + c
    return out


def thickened_piece(p, piece, m, shared, avoid=(), eps=THICKEN_EPS, reach=THICKEN_REACH):
    """C_N enlarged at each shared vertex w by a disk and tapered ray neighbourhoods.

    The rays landing at w are surrounded by disks of radius
    eps * r * log(R/r) / log(R/rho) at distance r from w (rho < r < R), and w
    by a disk of radius rho.  R is ``reach`` times the distance from w of the
    rays' points at potential below g_{N+m}, the part of the boundary of
    C_{N+m} near w.  rho stays below half the distance to ``avoid``.  The
    taper shrinks with r, so its preimage under the expanding return map is
    strictly thinner and the pulled-back piece no longer touches.
    """

    poly = p.boundary(piece)
    n = piece.depth
    g_outer, g_inner = p.g_level(n), p.g_level(n) / 2 ** m
    avoid = np.asarray(avoid, dtype=complex)
    parts = [Polygon(np.column_stack([poly.real, poly.imag])).buffer(0)]
    for w in shared:
        rays = []
        for a in p.levels[n].angles:
            k = p._col[a]
            if abs(p.bundle.landing[k] - w) < 1e-6:
                rays.append(p.bundle.polyline(k, g_max=g_outer, include_landing=False))
        inner_reach = max(float(np.abs(z[lv <= g_inner] - w).max(initial=0.0)) for lv, z in rays)
        if inner_reach == 0.0:
            continue
        R = reach * inner_reach
        rho = 0.5 * inner_reach
        if avoid.size:
            rho = min(rho, 0.5 * float(np.abs(avoid - w).min()))
        parts.append(Point(w.real, w.imag).buffer(rho, 64))
        for _, z in rays:
            r = np.abs(z - w)
            sel = (r > rho) & (r < R)
            width = eps * r[sel] * np.log(R / r[sel]) / math.log(R / rho)
            parts += [Point(q.real, q.imag).buffer(s, 16) for q, s in zip(z[sel], width)]
    shape = unary_union(parts)
    if shape.geom_type != "Polygon":
        shape = max(shape.geoms, key=lambda g: g.area)
    ext = np.asarray(shape.exterior.coords)
    return PolygonRegion(ext[:, 0] + 1j * ext[:, 1])


@dataclass(frozen=True)
class LevelBounds:
    index: int
    period: int
    cumulative: int
    depth: int                  # depth N of the outer piece actually used
    mod: float
    error_bound: float
    proxy: str                  # "puzzle annulus" or "thickened puzzle annulus"
    contained: bool             # inner region compactly inside outer on the grid
    orbit_points: int           # c(j), j <= J_max, j not a multiple of m
    violations: int             # of those, how many lie in the annulus

    @property
    def unbranched_fraction(self) -> float:
        return self.violations / self.orbit_points if self.orbit_points else 0.0


@dataclass(frozen=True)
class BoundsReport:
    c: complex
    j_max: int
    levels: tuple

    @property
    def floor(self) -> float:
        return min(lv.mod for lv in self.levels)

    @property
    def max_unbranched_fraction(self) -> float:
        return max(lv.unbranched_fraction for lv in self.levels)


def _nearest_mask_value(mask, grid, z):
    k = np.clip(np.rint((z.imag - grid.y0) / grid.h).astype(int), 0, grid.ny)
    j = np.clip(np.rint((z.real - grid.x0) / grid.h).astype(int), 0, grid.nx)
    return mask[k, j]


def bounds_report(cascade, J_max: int = DEFAULT_J_MAX, resolution: int = ANNULUS_RESOLUTION,
                  refine: bool = True) -> BoundsReport:
    """Per level: an annulus modulus around the domain piece and unbranched counts.

    Non-degenerate levels use mod(C_N minus C_{N+m}).  Where the pieces
    share boundary points the annulus is replaced by the thickened piece
    C'_{N'} (N' = N + 2 when the puzzle is deep enough) and the component of
    its preimage under P^m containing 0.
    """

    levels = list(cascade)
    if not levels:
        raise EmptyCascade("bounds need at least one renormalization level")
    c = levels[0].c
    orbit = critical_orbit(c, J_max)
    out = []
    for lv in levels:
        m, p = lv.cumulative, lv.puzzle
        others = orbit[[j for j in range(1, J_max + 1) if j % m]]
        if not lv.degenerate:
            V, U, depth = lv.outer_region(), lv.domain(), lv.N
            ann, proxy = lv.annulus, "puzzle annulus"
        else:
            depth = min(lv.N + THICKEN_EXTRA, p.max_depth)
            piece = p.critical(depth)
            V0 = PolygonRegion(p.boundary(piece))
            shared = _shared_vertices(c, piece, PullbackRegion(c, m, V0),
                                      make_grid(V0.bbox, resolution), m)
            V = thickened_piece(p, piece, m, shared, avoid=others)
            U = PullbackRegion(c, m, V)
            ann = annulus_modulus(V, U, resolution, refine, (depth, piece.id), (depth + m, 0),
                                  check_nesting=False)
            proxy = "thickened puzzle annulus"
        grid = make_grid(V.bbox, 2 * resolution)
        mu, mv = U.mask(grid), V.mask(grid)
        contained = bool((ndimage.binary_dilation(mu) <= mv).all())
        in_v = V.contains(others)
        in_u = U.contains(others) & _nearest_mask_value(mu, grid, others)
        viol = int(np.sum(in_v & ~in_u))
        out.append(LevelBounds(lv.index, lv.period, m, depth, ann.mod_value, ann.error_bound,
                               proxy, contained, int(others.size), viol))
    return BoundsReport(c, J_max, tuple(out))

