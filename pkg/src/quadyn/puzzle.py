"""Yoccoz puzzles: the ray cycle at alpha, partitions eta_n and membership.

A depth-n partition is described combinatorially by the sorted set S_n of
ray angles whose 2**n-th image lies in the base cycle, together with the
grouping of those rays by landing point.  Walking around the circle of
angles (equipotential arc -> down a ray -> across the landing point to the
next ray of the same landing class -> up that ray -> next arc) enumerates
the pieces.  Polygons are assembled lazily from the traced rays and
Newton-traced equipotential arcs and are only used for point membership.
"""
from __future__ import annotations

import bisect
import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from matplotlib.path import Path

from . import _rays
from .dynamics import classify_periodic, fixed_points, iterate_map
from .errors import (AlphaNotRepelling, DepthTruncated, DomainError, MultipleCycles,
                     NoCycleFound)
from .potential import green

BOUNDARY_TOL = 1e-7
LANDING_TOL = 1e-6
ARC_DENSITY = 2048       # equipotential samples per turn of angle
MIN_ARC_SAMPLES = 3


class Membership(enum.Enum):
    ON_BOUNDARY = "OnBoundary"
    EXTERIOR = "Exterior"


OnBoundary = Membership.ON_BOUNDARY
Exterior = Membership.EXTERIOR


@dataclass(frozen=True)
class RayCycleAtAlpha:
    q: int
    angles: tuple
    landing_residuals: tuple
    point: complex


def _single_cycle(angles):
    """True when doubling permutes the angle set as one cycle."""
    angles = set(angles)
    if not angles:
        return False
    start = next(iter(angles))
    seen, a = [], start
    while True:
        seen.append(a)
        a = (2 * a) % 1
        if a not in angles:
            return False
        if a == start:
            break
    return len(seen) == len(angles)


def alpha_ray_cycle(c: complex, q_max: int = 12) -> RayCycleAtAlpha:
    """Find the cycle of periodic rays landing at the alpha fixed point."""
    c = complex(c)
    beta, alpha = fixed_points(c)
    cls = classify_periodic(c, alpha, 1)
    if not cls.is_repelling:
        raise AlphaNotRepelling(f"alpha = {alpha} is {cls.kind} (multiplier {cls.multiplier})")
    for q in range(2, q_max + 1):
        den = 2 ** q - 1
        angles = [Fraction(a, den) for a in range(1, den)]
        bundle = _rays.trace_rational(c, angles)
        land = bundle.landing[: len(angles)]
        res = np.abs(land - alpha)
        hit = [a for a, r in zip(angles, res) if np.isfinite(r) and r < LANDING_TOL]
        if not hit:
            continue
        if len(hit) > q or not _single_cycle(hit):
            raise MultipleCycles(f"{len(hit)} period-{q} rays land at alpha; the cycle is ambiguous")
        hit.sort()
        resid = tuple(float(res[angles.index(a)]) for a in hit)
        return RayCycleAtAlpha(q, tuple(hit), resid, alpha)
    raise NoCycleFound(f"no ray cycle at alpha with period <= {q_max}")


def real_orbit_ray_angles(c: float, x: float, period: int):
    """Angles of the two rays landing at a real repelling periodic point.

    Uses the sign itinerary of the orbit: the upper ray angle has binary
    digits b_1 = 0, b_{k+1} = b_k xor [P^{k-1}(x) < 0].  Returns the pair
    (theta, 1 - theta) as Fractions (a single angle for theta = 0).
    """
    orbit = np.real(np.array([iterate_map(c, complex(x), k) for k in range(period)]))
    signs = [1 if v < 0 else 0 for v in orbit]
    parity = sum(signs) % 2
    p = period if parity == 0 else 2 * period
    bits = [0]
    for k in range(1, p):
        bits.append(bits[-1] ^ signs[(k - 1) % period])
    num = 0
    for b in bits:
        num = 2 * num + b
    theta = Fraction(num, 2 ** p - 1)
    if theta == 0:
        return (theta,)
    return (theta, 1 - theta)


def real_cycle_angles(c: float, x: float, period: int):
    """Rays landing on the whole orbit of a real periodic point (doubling invariant)."""
    out = set()
    for k in range(period):
        xk = iterate_map(c, complex(x), k).real
        out.update(real_orbit_ray_angles(c, xk, period))
    return tuple(sorted(out))


@dataclass(frozen=True)
class PuzzlePiece:
    depth: int
    id: int
    arcs: tuple           # (start, end) angle pairs, counterclockwise
    vertex_set: tuple     # landing points on the boundary
    is_critical: bool

    @property
    def key(self) -> tuple:
        return (self.depth, self.id)


@dataclass
class _Level:
    angles: list                    # sorted S_n
    index: dict                     # angle -> position in `angles`
    cls: dict                       # angle -> landing-class id
    members: list                   # class id -> sorted member angles
    landing: list                   # class id -> landing point
    arc_piece: list                 # arc index -> piece id
    pieces: list = field(default_factory=list)


class Puzzle:
    """Nested partitions eta_0 .. eta_N of {G < log r} cut by preimage rays.

    ``base_angles`` is a doubling-invariant set of rational angles (the ray
    cycle at alpha for the ordinary puzzle, the rays at a periodic orbit for
    the puzzles of renormalized maps).
    """

    def __init__(self, c, base_angles, depth, r=4.0, cycle=None, base_points=None):
        self.c = complex(c)
        self.r = float(r)
        self.max_depth = int(depth)
        self.cycle = cycle
        self.base_angles = tuple(sorted(Fraction(a) % 1 for a in base_angles))
        if set((2 * a) % 1 for a in self.base_angles) != set(self.base_angles):
            raise DomainError("base angles must be invariant under doubling")
        self._poly = {}
        self._arcs = {}
        self._build(base_points)

    # ----- construction -------------------------------------------------
    def g_level(self, n: int) -> float:
        return math.log(self.r) / 2 ** n

    def _build(self, base_points):
        N = max(self.max_depth, 1)
        S = [list(self.base_angles)]
        for n in range(1, N + 1):
            prev = S[-1]
            nxt = set(prev)
            for a in prev:
                nxt.add(a / 2)
                nxt.add(a / 2 + Fraction(1, 2))
            S.append(sorted(nxt))
        self.bundle = _rays.trace_rational(self.c, S[N], g_base=math.log(self.r))
        self._col = {a: i for i, a in enumerate(self.bundle.angles)}
        land = self.bundle.landing
        last = self.bundle.Z[-1]
        est = np.where(np.isfinite(land), land, last)
        bad = [a for a in S[N] if not self.bundle.landed[self._col[a]]]
        if bad:
            raise DepthTruncated(f"{len(bad)} rays at depth {N} did not land "
                                 f"(e.g. {bad[0]}); depth budget exceeds double precision")

        # depth 0 classes: cluster landing points
        pts = [est[self._col[a]] for a in S[0]]
        classes, landing = [], []
        for a, p in zip(S[0], pts):
            for k, L in enumerate(landing):
                if abs(p - L) < 1e3 * LANDING_TOL:
                    classes[k].append(a)
                    break
            else:
                classes.append([a])
                landing.append(p)
        if base_points is not None:
            landing = [min(base_points, key=lambda b: abs(b - L)) for L in landing]
        self.levels = [self._make_level(S[0], classes, landing)]
        for n in range(1, N + 1):
            prev = self.levels[-1]
            new_classes, new_landing = [], []
            for k, mem in enumerate(prev.members):
                w = prev.landing[k]
                s = cmath.sqrt(w - self.c)
                if abs(s) < 1e3 * LANDING_TOL:
                    raise DomainError("the critical point lies on the puzzle graph")
                plus, minus = [], []
                for a in mem:
                    for b in (a / 2, a / 2 + Fraction(1, 2)):
                        L = est[self._col[b]]
                        (plus if (L * s.conjugate()).real > 0 else minus).append(b)
                for grp, pt in ((plus, s), (minus, -s)):
                    if len(grp) != len(mem):
                        raise DepthTruncated("could not separate the two preimages of a landing point")
                    new_classes.append(sorted(grp))
                    new_landing.append(pt)
            self.levels.append(self._make_level(S[n], new_classes, new_landing))
        for n, lev in enumerate(self.levels):
            self._walk(n, lev)
        self._critical = [None] * len(self.levels)
        for n in range(len(self.levels) - 1, 0, -1):
            half = Fraction(1, 2)
            lev = self.levels[n]
            for piece in lev.pieces:
                starts = {a for a, _ in piece.arcs}
                if {(a + half) % 1 for a in starts} == starts:
                    self._critical[n] = piece.id
                    break
            else:
                raise DomainError(f"no symmetric piece at depth {n}")
        self._critical[0] = self.parent(self.levels[1].pieces[self._critical[1]]).id
        for n, lev in enumerate(self.levels):
            k = self._critical[n]
            p = lev.pieces[k]
            lev.pieces[k] = PuzzlePiece(p.depth, p.id, p.arcs, p.vertex_set, True)
        del self.levels[self.max_depth + 1:]
        del self._critical[self.max_depth + 1:]

    def _make_level(self, angles, classes, landing):
        cls = {}
        for k, mem in enumerate(classes):
            for a in mem:
                cls[a] = k
        return _Level(angles, {a: i for i, a in enumerate(angles)}, cls, classes, landing,
                      [None] * len(angles))

    def _walk(self, n, lev):
        K = len(lev.angles)

        def class_pred(a):
            mem = lev.members[lev.cls[a]]
            i = mem.index(a)
            return mem[i - 1]

        for k0 in range(K):
            if lev.arc_piece[k0] is not None:
                continue
            pid = len(lev.pieces)
            arcs, verts = [], []
            k = k0
            while lev.arc_piece[k] is None:
                lev.arc_piece[k] = pid
                a, b = lev.angles[k], lev.angles[(k + 1) % K]
                arcs.append((a, b))
                verts.append(lev.landing[lev.cls[b]])
                k = lev.index[class_pred(b)]
            if k != k0:
                raise DomainError("inconsistent landing classes: circle walk did not close")
            lev.pieces.append(PuzzlePiece(n, pid, tuple(arcs), tuple(verts), False))

    # ----- combinatorial queries ---------------------------------------
    @property
    def q(self) -> int:
        return self.cycle.q if self.cycle is not None else len(self.base_angles)

    def pieces(self, n: int):
        return list(self.levels[n].pieces)

    def piece(self, n: int, pid: int) -> PuzzlePiece:
        return self.levels[n].pieces[pid]

    def critical(self, n: int) -> PuzzlePiece:
        return self.levels[n].pieces[self._critical[n]]

    def _piece_of_arc(self, n, a):
        """Piece at depth n whose equipotential arc contains angle a (not an endpoint)."""
        lev = self.levels[n]
        angles = lev.angles
        i = bisect.bisect_right(angles, a) - 1
        return lev.pieces[lev.arc_piece[i % len(angles)]]

    @staticmethod
    def _arc_mid(a, b):
        length = (b - a) % 1 or Fraction(1)
        return (a + length / 2) % 1

    def parent(self, piece: PuzzlePiece) -> PuzzlePiece:
        if piece.depth == 0:
            raise ValueError("depth-0 pieces have no parent")
        a, b = piece.arcs[0]
        return self._piece_of_arc(piece.depth - 1, self._arc_mid(a, b))

    def image(self, piece: PuzzlePiece) -> PuzzlePiece:
        """Depth n-1 piece P_c(piece)."""
        if piece.depth == 0:
            raise ValueError("the image of a depth-0 piece is not a puzzle piece")
        a, b = piece.arcs[0]
        return self._piece_of_arc(piece.depth - 1, (2 * self._arc_mid(a, b)) % 1)

    def children(self, piece: PuzzlePiece):
        n = piece.depth + 1
        return [p for p in self.levels[n].pieces if self.parent(p).id == piece.id]

    def vertex_count(self, n: int) -> int:
        return len(self.levels[n].members)

    def ray_count(self, n: int) -> int:
        return len(self.levels[n].angles)

    # ----- geometry -----------------------------------------------------
    def _arc_samples(self, n):
        if n in self._arcs:
            return self._arcs[n]
        lev = self.levels[n]
        K = len(lev.angles)
        starts, counts, lens = [], [], []
        for k in range(K):
            a, b = lev.angles[k], lev.angles[(k + 1) % K]
            length = float((b - a) % 1 or 1)
            m = max(MIN_ARC_SAMPLES, math.ceil(length * ARC_DENSITY))
            starts.append(float(a))
            counts.append(m)
            lens.append(length)
        theta = np.concatenate([(s + L * np.arange(1, m + 1) / (m + 1)) % 1.0
                                for s, L, m in zip(starts, lens, counts)])
        g = self.g_level(n)
        levels = _float_levels(g)
        Z = _rays.newton_trace(self.c, theta, levels)[-1]
        out, pos = [], 0
        for m in counts:
            out.append(Z[pos:pos + m])
            pos += m
        self._arcs[n] = out
        return out

    def _ray_segment(self, a, n, landing):
        i = self._col[a]
        _, z = self.bundle.polyline(i, g_max=self.g_level(n), include_landing=False)
        return np.append(z, landing)

    def boundary(self, piece: PuzzlePiece) -> np.ndarray:
        """Closed boundary polyline (first point not repeated)."""
        key = piece.key
        if key in self._poly:
            return self._poly[key][0]
        n = piece.depth
        lev = self.levels[n]
        arcs = self._arc_samples(n)
        chunks = []
        for (a, b) in piece.arcs:
            k = lev.index[a]
            mem = lev.members[lev.cls[b]]
            a_next = mem[mem.index(b) - 1]
            L = lev.landing[lev.cls[b]]
            down = self._ray_segment(b, n, L)
            up = self._ray_segment(a_next, n, L)[::-1]
            top_a = self._ray_segment(a, n, L)[0]
            chunks.append([top_a])
            chunks.append(arcs[k])
            chunks.append(down)
            chunks.append(up[1:-1])
        poly = np.concatenate([np.atleast_1d(np.asarray(ch, dtype=complex)) for ch in chunks])
        poly = poly[np.isfinite(poly)]
        keep = np.ones(poly.size, dtype=bool)
        keep[1:] = np.abs(np.diff(poly)) > 1e-15
        poly = poly[keep]
        path = Path(np.column_stack([poly.real, poly.imag]), closed=False)
        bbox = (poly.real.min(), poly.real.max(), poly.imag.min(), poly.imag.max())
        self._poly[key] = (poly, path, bbox)
        return poly

    def diameter(self, piece: PuzzlePiece) -> float:
        """Diameter of the piece's intersection with the filled Julia set is not
        available geometrically; this is the diameter of the boundary polygon."""
        poly = self.boundary(piece)
        hull = poly[:: max(1, poly.size // 4000)]
        return float(np.max(np.abs(hull[:, None] - hull[None, :])))

    def contains(self, piece: PuzzlePiece, z) -> np.ndarray:
        """Strict interior test (crossing number) for one or many points."""
        self.boundary(piece)
        _, path, _ = self._poly[piece.key]
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return path.contains_points(np.column_stack([z.real, z.imag]))

    def boundary_distance(self, piece: PuzzlePiece, z) -> np.ndarray:
        poly = self.boundary(piece)
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return _polyline_distance(z, np.append(poly, poly[0]))

    def piece_containing(self, z: complex, n: int):
        return piece_containing(self, z, n)


def _float_levels(g):
    top = _rays.G_START
    k = math.ceil(_rays.SUBSTEPS * math.log2(top / g))
    lv = g * np.exp2(np.arange(k, -1, -1) / _rays.SUBSTEPS)
    if lv[0] < top:
        lv = np.concatenate([[top], lv])
    return lv


def _polyline_distance(z, poly):
    """Distance from each point of z to the polyline (chunked over segments)."""
    a, b = poly[:-1], poly[1:]
    d = b - a
    dd = np.abs(d) ** 2
    dd[dd == 0] = 1.0
    out = np.full(z.size, np.inf)
    step = max(1, 2_000_000 // max(1, z.size))
    with np.errstate(invalid="ignore", over="ignore"):     # far-away orbit points
        for s in range(0, a.size, step):
            aa, dv, ddv = a[s:s + step], d[s:s + step], dd[s:s + step]
            w = z[:, None] - aa[None, :]
            t = np.clip((w * dv.conj()[None, :]).real / ddv[None, :], 0.0, 1.0)
            dist = np.abs(w - t * dv[None, :]).min(axis=1)
            out = np.fmin(out, dist)
    return out


def build_puzzle(c: complex, depth: int, r: float = 4.0, q_max: int = 12) -> Puzzle:
    """Yoccoz puzzle of P_c to the given depth, cut by the ray cycle at alpha."""
    c = complex(c)
    beta, alpha = fixed_points(c)
    if not classify_periodic(c, beta, 1).is_repelling:
        raise DomainError("beta is not repelling")
    cycle = alpha_ray_cycle(c, q_max)
    return Puzzle(c, cycle.angles, depth, r=r, cycle=cycle, base_points=[alpha])


def piece_containing(p: Puzzle, z: complex, n: int):
    """Depth-n piece containing z, or OnBoundary / Exterior."""
    if not 0 <= n <= p.max_depth:
        raise ValueError(f"depth {n} outside 0..{p.max_depth}")
    z = complex(z)
    if green(p.c, z) > p.g_level(n):
        return Exterior
    for piece in p.levels[n].pieces:
        p.boundary(piece)
        _, path, (x0, x1, y0, y1) = p._poly[piece.key]
        if not (x0 - BOUNDARY_TOL <= z.real <= x1 + BOUNDARY_TOL
                and y0 - BOUNDARY_TOL <= z.imag <= y1 + BOUNDARY_TOL):
            continue
        if p.boundary_distance(piece, z)[0] < BOUNDARY_TOL:
            return OnBoundary
        if path.contains_point((z.real, z.imag)):
            return piece
    return Exterior


def critical_membership(p: Puzzle, z: complex, n: int):
    """True/False for z in C_n, or OnBoundary when within tolerance of its boundary."""
    piece = p.critical(n)
    if p.boundary_distance(piece, z)[0] < BOUNDARY_TOL:
        return OnBoundary
    return bool(p.contains(piece, z)[0])
