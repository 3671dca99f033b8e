"""Vectorized external-ray tracing.

Rays are traced in two stages. Down to a moderate potential every angle is
followed by Newton continuation on P^n(z) = exp(2^n (g + 2 pi i theta)),
with n chosen so that 2^n g lies in [G_START, 2 G_START).  Below that,
rational angles (whose doubling orbit is finite) are continued by pulling
back the ray of 2*theta at twice the potential through z -> +-sqrt(w - c),
picking the branch closest to the previous point of the same ray.  The
pullback is backward stable, so rays can be followed far below the
potential where Newton loses precision, which is what landing needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

G_START = 16.0
SUBSTEPS = 4            # potential levels per halving
NEWTON_MAXIT = 16
NEWTON_RTOL = 1e-12
MAX_SPLIT = 12
LAND_TOL = 1e-7         # Cauchy diameter that certifies landing
LAND_WINDOW = 16        # samples in the Cauchy window
EST_TOL = 1e-11         # keep pulling back until this diameter (better estimate)
POTENTIAL_FLOOR = 1e-12


def frac_doubling(theta, n: int) -> float:
    """(2**n * theta) mod 1, exact for Fractions."""
    if isinstance(theta, Fraction):
        p, q = theta.numerator, theta.denominator
        return (p * pow(2, n, q) % q) / q
    return math.fmod(math.ldexp(float(theta), n), 1.0) % 1.0


def as_angle(theta):
    if isinstance(theta, Fraction):
        return theta % 1
    if isinstance(theta, int):
        return Fraction(theta) % 1
    return float(theta) % 1.0


def doubling_closure(angles):
    """Close a list of rational angles under theta -> 2 theta mod 1.

    Returns (all_angles, index_of_double) with the requested angles first.
    """
    order = {}
    out = []
    for a in angles:
        a = as_angle(a)
        if a not in order:
            order[a] = len(out)
            out.append(a)
    i = 0
    while i < len(out):
        d = (2 * out[i]) % 1
        if d not in order:
            order[d] = len(out)
            out.append(d)
        i += 1
    dbl = np.array([order[(2 * a) % 1] for a in out], dtype=np.int64)
    return out, dbl


def newton_depth(g: float) -> int:
    if g >= G_START:
        return 0
    return max(0, math.ceil(math.log2(G_START / g) - 1e-12))


def _phases(angles, idx, n):
    if isinstance(angles, np.ndarray):
        return np.mod(np.ldexp(angles[idx], n), 1.0)
    return np.array([frac_doubling(angles[i], n) for i in idx])


def _newton(c, z, g, angles, idx):
    """Solve P^n(z) = target for the subset idx; returns (z, ok)."""
    n = newton_depth(g)
    phase = _phases(angles, idx, n)
    modulus = math.exp(math.ldexp(g, n))
    W = modulus * np.exp(2j * np.pi * phase)
    z = np.array(z, dtype=complex)
    ok = np.zeros(len(idx), dtype=bool)
    active = np.ones(len(idx), dtype=bool)
    for _ in range(NEWTON_MAXIT):
        za = z[active]
        Z = za.copy()
        dZ = np.ones_like(za)
        for _k in range(n):
            dZ = 2 * Z * dZ
            Z = Z * Z + c
        with np.errstate(all="ignore"):
            step = (Z - W[active]) / dZ
        bad = ~np.isfinite(step)
        step[bad] = 0
        za = za - step
        z[active] = za
        done = (np.abs(step) <= NEWTON_RTOL * np.maximum(1.0, np.abs(za))) & ~bad
        a_idx = np.flatnonzero(active)
        ok[a_idx[done]] = True
        active[a_idx[done | bad]] = False
        if not active.any():
            break
    # reject solutions that jumped to a neighbouring ray of the same level
    if n >= 2 and ok.any():
        m = n - 2
        chk = _phases(angles, idx, m)
        Zm = z.copy()
        for _k in range(m):
            Zm = Zm * Zm + c
        with np.errstate(all="ignore"):
            dphi = np.angle(Zm * np.exp(-2j * np.pi * chk))
        ok &= np.abs(dphi) < np.pi / 8
    ok &= np.isfinite(z)
    return z, ok


def _advance(c, z_prev, g_prev, g_new, angles, idx, depth=0):
    z, ok = _newton(c, z_prev, g_new, angles, idx)
    if ok.all() or depth >= MAX_SPLIT:
        z[~ok] = np.nan
        return z
    bad = np.flatnonzero(~ok)
    g_mid = math.sqrt(g_prev * g_new)
    zm = _advance(c, z_prev[bad], g_prev, g_mid, angles, idx[bad], depth + 1)
    good_mid = np.isfinite(zm)
    zb = np.full(len(bad), np.nan, dtype=complex)
    if good_mid.any():
        sel = np.flatnonzero(good_mid)
        zb[sel] = _advance(c, zm[sel], g_mid, g_new, angles, idx[bad][sel], depth + 1)
    z[bad] = zb
    return z


def newton_trace(c, angles, levels):
    """Newton continuation of every angle through the decreasing potentials.

    angles is a list of Fractions/floats or a float array (turns); levels[0]
    must be >= G_START.  Rows that fail are NaN from the failure on.
    """
    c = complex(c)
    levels = np.asarray(levels, dtype=float)
    if levels[0] < G_START:
        raise ValueError("first level must be >= G_START")
    na = len(angles)
    out = np.full((len(levels), na), np.nan, dtype=complex)
    idx_all = np.arange(na)
    phase0 = _phases(angles, idx_all, 0)
    out[0] = np.exp(levels[0] + 2j * np.pi * phase0)
    # the Boettcher map is the identity up to O(c/z) this far out; one solve removes it
    out[0] = _advance(c, out[0], levels[0], levels[0], angles, idx_all)
    for j in range(1, len(levels)):
        prev = out[j - 1]
        live = np.flatnonzero(np.isfinite(prev))
        if live.size == 0:
            break
        out[j, live] = _advance(c, prev[live], levels[j - 1], levels[j], angles, live)
    return out


def level_schedule(g_base: float, last_index: int, substeps: int = SUBSTEPS):
    """Potentials g_base * 2**(-j/substeps) from above G_START down to j=last_index.

    Returns (levels, offset) where levels[offset + j] corresponds to index j.
    """
    j0 = max(0, math.ceil(substeps * math.log2(G_START / g_base))) if g_base < G_START else 0
    js = np.arange(-j0, last_index + 1)
    return g_base * np.exp2(-js / substeps), j0


@dataclass
class RayBundle:
    c: complex
    angles: list
    double_index: np.ndarray
    levels: np.ndarray      # potentials of stored rows (decreasing)
    Z: np.ndarray           # rows x angles
    landing: np.ndarray
    landed: np.ndarray
    cauchy_diameter: np.ndarray
    newton_rows: int
    precision_floor: np.ndarray

    def index(self, theta) -> int:
        theta = as_angle(theta)
        return self.angles.index(theta)

    def polyline(self, i: int, g_max: float | None = None, include_landing: bool = True):
        """(potentials, points) of ray i with potential <= g_max, ordered outward -> inward."""
        col = self.Z[:, i]
        keep = np.isfinite(col)
        if g_max is not None:
            keep &= self.levels <= g_max * (1 + 1e-12)
        g, z = self.levels[keep], col[keep]
        if z.size > 1:
            # drop the converged tail: consecutive duplicates below 1e-12
            moved = np.ones(z.size, dtype=bool)
            moved[1:] = np.abs(np.diff(z)) > 1e-12
            g, z = g[moved], z[moved]
        if include_landing and self.landed[i]:
            g = np.append(g, 0.0)
            z = np.append(z, self.landing[i])
        return g, z


def trace_rational(c, angles, g_base=math.log(4.0), newton_index=None, land=True,
                   tail_halvings=1500, substeps=SUBSTEPS):
    """Trace rational rays (and their doubling orbits) down to landing.

    Newton rows cover potentials g_base*2**(-j/S) for j <= newton_index; the
    pullback tail continues to landing.  Returns a RayBundle whose first
    len(angles) columns are the requested angles.
    """
    c = complex(c)
    all_angles, dbl = doubling_closure(angles)
    S = substeps
    if newton_index is None:
        newton_index = 2 * S
    levels, off = level_schedule(g_base, newton_index, S)
    Z = newton_trace(c, all_angles, levels)
    na = len(all_angles)
    floor = np.zeros(na, dtype=bool)
    if not land:
        return RayBundle(c, all_angles, dbl, levels, Z, np.full(na, np.nan + 0j),
                         np.zeros(na, bool), np.full(na, np.inf), len(levels), floor)
    if not np.isfinite(Z[-S - 1:]).all():
        bad = ~np.isfinite(Z[-S - 1:]).all(axis=0)
        # a ray whose Newton stage failed cannot seed the pullback; its
        # preimages are poisoned as well, mark and continue with NaN
        floor |= bad
    ring = [Z[len(levels) - S + k].copy() for k in range(S)]   # last S rows
    prev = Z[-1].copy()
    stored_rows, stored_levels = [], []
    window = []
    g_last = levels[-1]
    landed = np.zeros(na, dtype=bool)
    diam = np.full(na, np.inf)
    total = tail_halvings * S
    t = 0
    while t < total:
        t += 1
        src = ring[0][dbl]
        s = np.sqrt(src - c)
        flip = (s.real * prev.real + s.imag * prev.imag) < 0
        s[flip] = -s[flip]
        ring.pop(0)
        ring.append(s)
        prev = s
        g_t = g_last * 2.0 ** (-t / S)
        if t <= 8 * S or (t <= 64 * S and t % S == 0) or t % (4 * S) == 0:
            stored_rows.append(s.copy())
            stored_levels.append(g_t)
        window.append(s)
        if len(window) > LAND_WINDOW:
            window.pop(0)
        if len(window) == LAND_WINDOW and t % S == 0:
            W = np.array(window)
            d = 2 * np.max(np.abs(W - W[-1]), axis=0)
            diam = np.where(np.isfinite(d), d, np.inf)
            landed = diam < LAND_TOL
            if np.all(diam[np.isfinite(diam)] < EST_TOL) or not np.isfinite(diam).any():
                break
            if t > 200 * S and np.all(landed | ~np.isfinite(diam)):
                # landed everywhere; stop once the estimate has settled enough
                if np.all(diam[np.isfinite(diam)] < 1e-9):
                    break
    if stored_rows:
        Zt = np.vstack([Z, np.array(stored_rows)])
        lv = np.concatenate([levels, np.array(stored_levels)])
    else:
        Zt, lv = Z, levels
    landing = np.where(landed, prev, np.nan + 0j)
    floor |= ~landed
    return RayBundle(c, all_angles, dbl, lv, Zt, landing, landed, diam, len(levels), floor)
