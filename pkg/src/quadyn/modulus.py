"""Conformal moduli of annuli by discrete extremal length.

The annulus between an outer and an inner region is rasterized on a square
grid.  Grid edges are unit conductors; an edge cut by a boundary gets the
Shortley-Weller conductance 1/t, where t is the fraction of the edge lying
in the annulus, with the boundary potential applied at the crossing.  The
Dirichlet problem u = 0 on the inner region, u = 1 outside the outer region
is solved with algebraic multigrid, and the total energy E gives

    mod = 2*pi / E        (round annulus r < |z| < 1  ->  mod = -log r).

Two resolutions are combined by Richardson extrapolation; their spread is
the reported error bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import pyamg
import scipy.sparse as sp
from scipy import ndimage
from matplotlib.path import Path

from .errors import NotNested, ResolutionInsufficient

DEFAULT_RESOLUTION = 512
MIN_CUT_FRACTION = 1e-2
TOUCH_TOL = 1e-7
BISECTION_STEPS = 30


@dataclass(frozen=True)
class Grid:
    x0: float
    y0: float
    h: float
    nx: int      # columns are x0 + j*h, j = 0..nx
    ny: int      # rows are y0 + k*h, k = 0..ny

    def points(self):
        x = self.x0 + self.h * np.arange(self.nx + 1)
        y = self.y0 + self.h * np.arange(self.ny + 1)
        return x[None, :] + 1j * y[:, None]


class Region:
    """A closed planar region given by a membership test."""

    def __init__(self, contains, bbox):
        self._contains = contains
        self.bbox = tuple(float(v) for v in bbox)   # xmin, xmax, ymin, ymax

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self._contains(z.ravel()), dtype=bool).reshape(z.shape)

    def mask(self, grid: Grid):
        return self.contains(grid.points())

    def cut_fractions(self, grid, p, q, inside_p):
        """Fraction of each segment p -> q before its membership flips."""
        lo = np.zeros(p.shape)
        hi = np.ones(p.shape)
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            same = self.contains(p + mid * (q - p)) == inside_p
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        return 0.5 * (lo + hi)


class PolygonRegion(Region):
    """Region bounded by a closed polyline; rasterized exactly by scanlines."""

    def __init__(self, polyline):
        poly = np.asarray(polyline, dtype=complex).ravel()
        if poly.size and poly[0] == poly[-1]:
            poly = poly[:-1]
        if poly.size < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        self.polyline = poly
        self._path = Path(np.column_stack([poly.real, poly.imag]))
        super().__init__(self._path_contains,
                         (poly.real.min(), poly.real.max(), poly.imag.min(), poly.imag.max()))
        self._cache = {}

    def _path_contains(self, z):
        return self._path.contains_points(np.column_stack([z.real, z.imag]))

    def _scan(self, grid: Grid, transpose: bool):
        """Sorted crossing keys row*(W) + (x - x0)/h for every scanline."""
        key = (grid, transpose)
        if key in self._cache:
            return self._cache[key]
        poly = self.polyline
        if transpose:
            xs, ys, x0, y0, nrows, ncols = poly.imag, poly.real, grid.y0, grid.x0, grid.nx, grid.ny
        else:
            xs, ys, x0, y0, nrows, ncols = poly.real, poly.imag, grid.x0, grid.y0, grid.ny, grid.nx
        xa, ya = xs, ys
        xb, yb = np.roll(xs, -1), np.roll(ys, -1)
        h = grid.h
        ymin, ymax = np.minimum(ya, yb), np.maximum(ya, yb)
        k0 = np.ceil((ymin - y0) / h).astype(np.int64)
        k1 = np.ceil((ymax - y0) / h).astype(np.int64)       # exclusive
        k0 = np.clip(k0, 0, nrows + 1)
        k1 = np.clip(k1, 0, nrows + 1)
        cnt = np.maximum(k1 - k0, 0)
        edge = np.repeat(np.arange(xa.size), cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        rows = k0[edge] + offs
        yk = y0 + rows * h
        e = edge
        x = xa[e] + (yk - ya[e]) * (xb[e] - xa[e]) / (yb[e] - ya[e])
        W = ncols + 2
        keys = np.sort(rows * W + (x - x0) / h)
        self._cache[key] = (keys, W, nrows, ncols)
        return self._cache[key]

    def mask(self, grid: Grid):
        keys, W, nrows, ncols = self._scan(grid, False)
        rows = np.floor(keys / W).astype(np.int64)
        frac = keys - rows * W
        j = np.clip(np.floor(frac).astype(np.int64) + 1, 0, ncols + 1)
        diff = np.zeros((nrows + 1, ncols + 2), dtype=np.int64)
        np.add.at(diff, (rows, j), 1)
        return (np.cumsum(diff, axis=1)[:, : ncols + 1] % 2).astype(bool)

    def grid_cut_fractions(self, grid, rows, cols, axis, forward):
        """Exact cut fraction for grid edges from node (rows, cols).

        axis 1: edge toward column cols+1 (forward) or cols-1; axis 0 same for rows.
        """
        transpose = axis == 0
        keys, W, _, _ = self._scan(grid, transpose)
        line, pos = (cols, rows) if transpose else (rows, cols)
        q = line * W + pos
        if forward:
            i = np.searchsorted(keys, q, side="right")
            i = np.clip(i, 0, keys.size - 1)
            t = keys[i] - q
        else:
            i = np.searchsorted(keys, q, side="left") - 1
            i = np.clip(i, 0, keys.size - 1)
            t = q - keys[i]
        bad = (t < 0) | (t > 1)
        return np.where(bad, 1.0, t)


class PullbackRegion(Region):
    """The component containing ``seed`` of {z : P_c^m(z) in target}.

    Rasterized by evaluating P_c^m on the grid and labelling connected
    components; the point test (used for boundary cuts) is the plain
    preimage test, which agrees with the component near its boundary.
    """

    def __init__(self, c, m, target: Region, seed=0j, bbox=None):
        self.c = complex(c)
        self.m = int(m)
        self.target = as_region(target)
        self.seed = complex(seed)
        super().__init__(self._preimage, bbox or self.target.bbox)

    def _preimage(self, z):
        w = z.copy()
        with np.errstate(all="ignore"):
            for _ in range(self.m):
                w = w * w + self.c
        x0, x1, y0, y1 = self.target.bbox
        ok = np.isfinite(w) & (w.real >= x0) & (w.real <= x1) & (w.imag >= y0) & (w.imag <= y1)
        out = np.zeros(z.shape, dtype=bool)
        if ok.any():
            out[ok] = self.target.contains(w[ok])
        return out

    def mask(self, grid: Grid):
        full = self.contains(grid.points())
        labels, _ = ndimage.label(full)
        j = int(round((self.seed.real - grid.x0) / grid.h))
        k = int(round((self.seed.imag - grid.y0) / grid.h))
        if not (0 <= k <= grid.ny and 0 <= j <= grid.nx) or not full[k, j]:
            raise ResolutionInsufficient("seed point is not resolved inside the pullback")
        return labels == labels[k, j]


def circle(center=0j, radius=1.0, n=4096) -> PolygonRegion:
    t = 2 * np.pi * np.arange(n) / n
    return PolygonRegion(complex(center) + radius * np.exp(1j * t))


def square(center=0j, half=1.0) -> PolygonRegion:
    c = complex(center)
    return PolygonRegion(c + half * np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]))


def as_region(obj) -> Region:
    if isinstance(obj, Region):
        return obj
    return PolygonRegion(obj)


@dataclass(frozen=True)
class AnnulusEstimate:
    mod_value: float
    grid_resolution: int
    error_bound: float
    coarse: float = math.nan
    fine: float = math.nan
    degenerate: bool = False
    outer_id: object = None
    inner_id: object = None
    convention: str = "mod = -log r (round annulus r < |z| < 1)"


def _cuts(region, grid, rows, cols, axis, forward, inside):
    if isinstance(region, PolygonRegion):
        return region.grid_cut_fractions(grid, rows, cols, axis, forward)
    h = grid.h
    p = grid.x0 + cols * h + 1j * (grid.y0 + rows * h)
    step = (h if axis == 1 else 1j * h) * (1 if forward else -1)
    return region.cut_fractions(grid, p, p + step, inside)


def make_grid(bbox, resolution) -> Grid:
    """Square grid covering bbox with `resolution` cells across its longer side."""
    xmin, xmax, ymin, ymax = bbox
    h = max(xmax - xmin, ymax - ymin) / resolution
    return Grid(xmin - 2 * h, ymin - 2 * h, h,
                int(math.ceil((xmax - xmin) / h)) + 4, int(math.ceil((ymax - ymin) / h)) + 4)


def grid_modulus(outer, inner, resolution=DEFAULT_RESOLUTION, bbox=None):
    """Single-resolution estimate; returns (mod, number of annulus nodes)."""
    outer, inner = as_region(outer), as_region(inner)
    grid = make_grid(bbox or outer.bbox, resolution)
    mo = outer.mask(grid)
    mi = inner.mask(grid)
    # node type: 0 annulus (unknown), 1 inner (u = 0), 2 outside (u = 1)
    kind = np.where(mi, 1, np.where(mo, 0, 2))
    unknown = kind == 0
    nun = int(unknown.sum())
    if nun == 0:
        raise ResolutionInsufficient("no grid node lies strictly inside the annulus")
    index = -np.ones(kind.shape, dtype=np.int64)
    index[unknown] = np.arange(nun)
    rows_i, cols_i = [], []
    vals = []
    diag = np.zeros(nun)
    rhs = np.zeros(nun)
    energy_const = 0.0
    boundary_terms = []     # (unknown index, conductance, boundary value)

    for axis in (0, 1):
        if axis == 1:
            a, b = kind[:, :-1], kind[:, 1:]
            ra, ca = np.nonzero(np.ones_like(a, dtype=bool))
            rb, cb = ra, ca + 1
        else:
            a, b = kind[:-1, :], kind[1:, :]
            ra, ca = np.nonzero(np.ones_like(a, dtype=bool))
            rb, cb = ra + 1, ca
        ka, kb = a.ravel(), b.ravel()
        # interior edges
        sel = (ka == 0) & (kb == 0)
        ia, ib = index[ra[sel], ca[sel]], index[rb[sel], cb[sel]]
        rows_i += [ia, ib]
        cols_i += [ib, ia]
        vals += [-np.ones(ia.size), -np.ones(ia.size)]
        np.add.at(diag, ia, 1.0)
        np.add.at(diag, ib, 1.0)
        # annulus node next to a boundary node (both orientations)
        for src_is_a in (True, False):
            if src_is_a:
                sel = (ka == 0) & (kb != 0)
                r0, c0, other = ra[sel], ca[sel], kb[sel]
                forward = True
            else:
                sel = (kb == 0) & (ka != 0)
                r0, c0, other = rb[sel], cb[sel], ka[sel]
                forward = False
            if not sel.any():
                continue
            t = np.ones(r0.size)
            to_in = other == 1
            if to_in.any():
                t[to_in] = _cuts(inner, grid, r0[to_in], c0[to_in], axis, forward, False)
            to_out = other == 2
            if to_out.any():
                t[to_out] = _cuts(outer, grid, r0[to_out], c0[to_out], axis, forward, True)
            cond = 1.0 / np.maximum(t, MIN_CUT_FRACTION)
            value = np.where(to_in, 0.0, 1.0)
            idx = index[r0, c0]
            np.add.at(diag, idx, cond)
            np.add.at(rhs, idx, cond * value)
            boundary_terms.append((idx, cond, value))
        # inner node directly next to an outside node: a sliver narrower than h
        for src_is_a in (True, False):
            if src_is_a:
                sel = (ka == 1) & (kb == 2)
                r0, c0, forward = ra[sel], ca[sel], True
            else:
                sel = (kb == 1) & (ka == 2)
                r0, c0, forward = rb[sel], cb[sel], False
            if not sel.any():
                continue
            t_in = _cuts(inner, grid, r0, c0, axis, forward, True)
            t_out = _cuts(outer, grid, r0, c0, axis, forward, True)
            width = np.maximum(t_out - t_in, MIN_CUT_FRACTION)
            energy_const += float(np.sum(1.0 / width))

    A = sp.csr_matrix((np.concatenate(vals + [diag]),
                       (np.concatenate(rows_i + [np.arange(nun)]),
                        np.concatenate(cols_i + [np.arange(nun)]))), shape=(nun, nun))
    u = _solve(A, rhs)
    # energy = sum over edges of conductance * (difference)^2
    energy = energy_const
    Ai = A - sp.diags(A.diagonal())
    coo = sp.triu(Ai, k=1).tocoo()
    energy += float(np.sum(-coo.data * (u[coo.row] - u[coo.col]) ** 2))
    for idx, cond, value in boundary_terms:
        energy += float(np.sum(cond * (u[idx] - value) ** 2))
    if energy <= 0:
        raise ResolutionInsufficient("zero energy: boundaries not separated on the grid")
    return 2 * math.pi / energy, nun


def _solve(A, b):
    if A.shape[0] < 20000:
        from scipy.sparse.linalg import spsolve
        return spsolve(A.tocsc(), b)
    # pyamg draws spectral-radius start vectors from the global RNG; pin it so
    # repeated runs give identical bits, then restore the caller's state
    state = np.random.get_state()
    np.random.seed(0)
    try:
        ml = pyamg.smoothed_aggregation_solver(A, symmetry="symmetric", max_coarse=500)
        return ml.solve(b, tol=1e-11, accel="cg", maxiter=400)
    finally:
        np.random.set_state(state)


def _touching(outer, inner, tol=TOUCH_TOL):
    if not (isinstance(outer, PolygonRegion) and isinstance(inner, PolygonRegion)):
        return False
    from .puzzle import _polyline_distance
    op = np.append(outer.polyline, outer.polyline[0])
    d = _polyline_distance(inner.polyline, op)
    return bool(d.min() < tol)


def annulus_modulus(outer, inner, resolution: int = DEFAULT_RESOLUTION, refine: bool = True,
                    outer_id=None, inner_id=None, check_nesting: bool = True) -> AnnulusEstimate:
    """Modulus (-log r convention) of the annulus outer minus inner.

    ``outer`` and ``inner`` are closed polylines (complex arrays) or Region
    objects.  Touching boundaries give 0.  With ``refine`` the grid is
    doubled and the two values are Richardson-extrapolated.
    """
    outer, inner = as_region(outer), as_region(inner)
    if check_nesting and isinstance(inner, PolygonRegion) and isinstance(outer, PolygonRegion):
        pts = inner.polyline
        inside = outer.contains(pts)
        if not inside.all():
            from .puzzle import _polyline_distance
            d = _polyline_distance(pts[~inside], np.append(outer.polyline, outer.polyline[0]))
            if (d > TOUCH_TOL).any():
                raise NotNested("inner region is not contained in the outer region")
    if _touching(outer, inner):
        return AnnulusEstimate(0.0, resolution, 0.0, 0.0, 0.0, True, outer_id, inner_id)
    m1, _ = grid_modulus(outer, inner, resolution)
    if not refine:
        return AnnulusEstimate(m1, resolution, math.nan, m1, math.nan, False, outer_id, inner_id)
    m2, _ = grid_modulus(outer, inner, 2 * resolution)
    # Shortley-Weller energies converge at second order on smooth boundaries;
    # corners slow this down, which the (deliberately wide) bound absorbs
    value = (4 * m2 - m1) / 3
    err = 2 * abs(m2 - m1) + 1e-12
    return AnnulusEstimate(value, 2 * resolution, err, m1, m2, False, outer_id, inner_id)


def piece_region(p, piece) -> PolygonRegion:
    return PolygonRegion(p.boundary(piece))


def _share_vertex(outer_piece, inner_piece, tol=1e-9) -> bool:
    return any(abs(a - b) < tol for a in outer_piece.vertex_set for b in inner_piece.vertex_set)


def piece_annulus(p, outer_piece, inner_piece, resolution=DEFAULT_RESOLUTION, refine=True):
    """mod(outer \\ inner) for nested puzzle pieces (0 when they share a vertex)."""
    if _share_vertex(outer_piece, inner_piece):
        return AnnulusEstimate(0.0, resolution, 0.0, 0.0, 0.0, True, outer_piece.key, inner_piece.key)
    return annulus_modulus(piece_region(p, outer_piece), piece_region(p, inner_piece),
                           resolution, refine, outer_piece.key, inner_piece.key,
                           check_nesting=False)


@dataclass
class ModuliSeries:
    x: complex
    terms: list                 # AnnulusEstimate or None for failed terms
    partial_sums: list
    errors: list = field(default_factory=list)     # (n, "ErrorType: message")

    def values(self):
        return [t.mod_value if t is not None else math.nan for t in self.terms]

    def rows(self):
        """(n, mod, partial_sum, error_bound) per depth."""
        out = []
        for n, (t, s) in enumerate(zip(self.terms, self.partial_sums)):
            out.append((n, t.mod_value if t else math.nan, s, t.error_bound if t else math.nan))
        return out


def moduli_series(p, x: complex = 0j, length: int | None = None,
                  resolution: int = DEFAULT_RESOLUTION, refine: bool = True) -> ModuliSeries:
    """mod(A_n(x)), A_n = D_n(x) minus D_{n+1}(x), with running partial sums."""
    from .errors import QuadynError
    from .puzzle import Membership, piece_containing

    length = p.max_depth if length is None else length
    if length > p.max_depth:
        raise ValueError(f"series of length {length} needs puzzle depth {length}")
    ends = []
    for n in range(length + 1):
        d = p.critical(n) if complex(x) == 0 else piece_containing(p, x, n)
        if isinstance(d, Membership):
            raise ValueError(f"x is not interior to a depth-{n} piece ({d.value})")
        ends.append(d)
    terms, sums, errs, total = [], [], [], 0.0
    for n in range(length):
        try:
            t = piece_annulus(p, ends[n], ends[n + 1], resolution, refine)
            total += t.mod_value
        except QuadynError as exc:       # flagged term; the sum continues
            t = None
            errs.append((n, f"{type(exc).__name__}: {exc}"))
        terms.append(t)
        sums.append(total)
    return ModuliSeries(complex(x), terms, sums, errs)


@dataclass(frozen=True)
class CoveringReport:
    piece: tuple
    child: tuple
    kind: str                   # critical, semi-critical, non-critical
    mod: float
    image_mod: float
    expected_ratio: float       # 1/2, 1, or lower bound 1/2 (semi-critical)
    ratio: float
    relative_deviation: float
    error_bound: float


def covering_degree_check(p, piece, child=None, resolution: int = DEFAULT_RESOLUTION,
                          refine: bool = True) -> CoveringReport:
    """Compare mod(A) with mod(P_c(A)) for A = piece minus child.

    critical (piece and child both critical): mod(A) = mod(P(A))/2;
    semi-critical (only piece critical): mod(A) >= mod(P(A))/2;
    non-critical: mod(A) = mod(P(A)).
    """
    if piece.depth < 1 or piece.depth + 1 > p.max_depth:
        raise ValueError("need depth >= 1 and one more level below the piece")
    if child is None:
        if piece.is_critical:
            child = p.critical(piece.depth + 1)
        else:
            kids = [k for k in p.children(piece) if not _share_vertex(piece, k)]
            if not kids:
                raise ValueError("every child of this piece touches its boundary")
            child = kids[0]
    a = piece_annulus(p, piece, child, resolution, refine)
    b = piece_annulus(p, p.image(piece), p.image(child), resolution, refine)
    if piece.is_critical and child.is_critical:
        kind, expect = "critical", 0.5
    elif piece.is_critical:
        kind, expect = "semi-critical", 0.5
    else:
        kind, expect = "non-critical", 1.0
    ratio = a.mod_value / b.mod_value if b.mod_value > 0 else math.nan
    dev = abs(ratio - expect) / expect if math.isfinite(ratio) else math.nan
    return CoveringReport(piece.key, child.key, kind, a.mod_value, b.mod_value, expect,
                          ratio, dev, a.error_bound + b.error_bound)
