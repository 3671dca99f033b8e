"""Green's function, external angles, external rays and equipotentials."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _rays
from .dynamics import _check_finite
from .errors import BudgetExhausted, DisconnectedJulia, NewtonDiverged, NotEscaping, PrecisionFloor

ESCAPE_BIG = 1e8
GREEN_BUDGET = 2 ** 14
CYCLE_TOL = 1e-12
MIN_ANGLE_POTENTIAL = 1e-4


@dataclass(frozen=True)
class GreenEstimate:
    """Potential value plus how it was decided."""
    value: float
    escaped: bool
    certified: bool          # False when the budget ran out undecided
    iterations: int


def _green_scalar(c, z, budget=GREEN_BUDGET):
    anchor, power = z, 1
    for n in range(budget + 1):
        a = abs(z)
        if a > ESCAPE_BIG:
            return (2 * math.log(a) + math.log(abs(1 + c / (z * z)))) / 2.0 ** (n + 1), True, True, n
        if n > 0 and abs(z - anchor) <= CYCLE_TOL * max(1.0, a):
            return 0.0, False, True, n
        if n == power:
            anchor, power = z, 2 * power
        if n < budget:
            z = z * z + c
    return 0.0, False, False, budget


def _green_array(c, z, budget=GREEN_BUDGET):
    c = complex(c)
    if np.size(z) == 1:
        out = _green_scalar(c, complex(np.ravel(z)[0]), budget)
        return tuple(np.reshape(np.array(v), np.shape(z)) for v in out)
    z = np.array(z, dtype=complex, copy=True)
    shape = z.shape
    z = z.ravel()
    g = np.zeros(z.size)
    escaped = np.zeros(z.size, dtype=bool)
    certified = np.zeros(z.size, dtype=bool)
    iters = np.zeros(z.size, dtype=np.int64)
    live = np.arange(z.size)
    w = z.copy()
    # Brent-style cycle detection: compare against a checkpoint refreshed at powers of two
    anchor = w.copy()
    power = 1
    for n in range(budget + 1):
        a = np.abs(w)
        out = a > ESCAPE_BIG
        if out.any():
            wo = w[out]
            g[live[out]] = (2 * np.log(a[out]) + np.log(np.abs(1 + c / (wo * wo)))) / 2.0 ** (n + 1)
            escaped[live[out]] = True
            certified[live[out]] = True
            iters[live[out]] = n
            keep = ~out
            live, w, anchor = live[keep], w[keep], anchor[keep]
        if live.size == 0:
            break
        if n > 0:
            cyc = np.abs(w - anchor) <= CYCLE_TOL * np.maximum(1.0, np.abs(w))
            if cyc.any():
                certified[live[cyc]] = True
                iters[live[cyc]] = n
                keep = ~cyc
                live, w, anchor = live[keep], w[keep], anchor[keep]
                if live.size == 0:
                    break
        if n == power:
            anchor = w.copy()
            power *= 2
        if n < budget:
            w = w * w + c
    iters[live] = budget
    return g.reshape(shape), escaped.reshape(shape), certified.reshape(shape), iters.reshape(shape)


def green_estimate(c: complex, z: complex) -> GreenEstimate:
    """Green's function of K_c at z with the certificate status."""
    _check_finite(c, z)
    g, esc, cert, it = _green_array(c, [z])
    return GreenEstimate(float(g[0]), bool(esc[0]), bool(cert[0]), int(it[0]))


def green(c: complex, z, strict: bool = False):
    """Green's function G(z) = lim 2**-n log|P^n(z)| (0 on the filled Julia set).

    Accepts a scalar or an array of points.  Orbits that neither escape nor
    settle on a cycle within 2**14 steps get G = 0; with ``strict=True`` they
    raise BudgetExhausted instead.
    """
    scalar = np.ndim(z) == 0
    g, esc, cert, _ = _green_array(c, np.atleast_1d(z))
    if strict and not cert.all():
        raise BudgetExhausted("orbit neither escaped nor reached a cycle within the budget")
    return float(g[0]) if scalar else g


def _bottcher_angle(c, w):
    """arg of the Boettcher coordinate in turns for |w| large (product formula)."""
    total = math.atan2(w.imag, w.real)
    scale = 1.0
    for _ in range(60):
        nxt = w * w + c
        scale /= 2
        total += scale * math.atan2((nxt / (w * w)).imag, (nxt / (w * w)).real)
        w = nxt
        if abs(w) > 1e150 or scale < 1e-18:
            break
    return (total / (2 * math.pi)) % 1.0


def external_angle(c: complex, z: complex) -> float:
    """Angle in turns of the external ray through the escaping point z.

    The orbit is followed until |P^n(z)| is large enough for the Boettcher
    product to be unambiguous; the angle is then pulled back one step at a
    time, each time choosing between the two halves by tracing the
    candidate ray to the potential of the orbit point.
    """
    c = complex(c)
    z = complex(z)
    _check_finite(c, z)
    g = green(c, z)
    if g <= MIN_ANGLE_POTENTIAL:
        raise NotEscaping(f"G(z) = {g:.3g} is not above {MIN_ANGLE_POTENTIAL}")
    orbit = [z]
    safe = 4 * max(1.0, abs(c)) + 4
    while abs(orbit[-1]) < safe:
        orbit.append(orbit[-1] ** 2 + c)
    theta = _bottcher_angle(c, orbit[-1])
    for k in range(len(orbit) - 2, -1, -1):
        zk = orbit[k]
        gk = g * 2.0 ** k
        cand = theta / 2
        pt = _ray_point(c, cand, gk)
        if not np.isfinite(pt) or abs(pt - zk) > abs(pt + zk):
            cand = (cand + 0.5) % 1.0
        theta = cand
    return theta % 1.0


def _float_schedule(g_min, substeps=_rays.SUBSTEPS):
    top = _rays.G_START
    if g_min >= top:
        return np.array([g_min])
    k = math.ceil(substeps * math.log2(top / g_min))
    return g_min * np.exp2(np.arange(k, -1, -1) / substeps)


def _ray_point(c, theta, g):
    levels = _float_schedule(g)
    if levels[0] < _rays.G_START:
        levels = np.concatenate([[_rays.G_START], levels])
    Z = _rays.newton_trace(c, [theta], levels)
    return complex(Z[-1, 0])


@dataclass
class ExternalRay:
    theta: object
    potentials: np.ndarray
    points: np.ndarray
    landing: complex | None = None
    landed: bool = False
    cauchy_diameter: float = math.inf

    def __len__(self):
        return len(self.points)


@dataclass
class EquipotentialCurve:
    level: float
    points: np.ndarray
    valid: np.ndarray = field(default=None)

    @property
    def potential(self) -> float:
        return math.log(self.level)


def _rational(theta):
    if isinstance(theta, Fraction):
        return theta % 1
    if isinstance(theta, int):
        return Fraction(theta) % 1
    f = Fraction(float(theta)).limit_denominator(1 << 24)
    if abs(float(f) - float(theta)) < 1e-15:
        return f % 1
    return None


def _check_connected(c):
    if green(c, 0j) > 0:
        raise DisconnectedJulia(f"the critical point escapes for c={c!r}; rays are not traced "
                                "for disconnected Julia sets")


def trace_ray(c: complex, theta, g_min: float = 0.0) -> ExternalRay:
    """Trace the external ray of angle theta from potential 16 down to g_min.

    g_min = 0 requests landing.  Rational angles are followed to their
    landing point; irrational (non-rational float) angles can only be traced
    down to a positive potential.
    """
    c = complex(c)
    _check_finite(c)
    if not 0 <= float(theta) < 1:
        raise ValueError("theta must lie in [0, 1)")
    if g_min < 0:
        raise ValueError("g_min must be >= 0")
    _check_connected(c)
    if g_min > 0:
        levels = _float_schedule(g_min)
        if levels[0] < _rays.G_START:
            levels = np.concatenate([[_rays.G_START], levels])
        ang = _rational(theta)
        Z = _rays.newton_trace(c, [ang if ang is not None else float(theta)], levels)[:, 0]
        good = np.isfinite(Z)
        ray = ExternalRay(theta, levels[good], Z[good])
        if not good.all():
            err = NewtonDiverged(f"Newton continuation failed below potential {levels[good][-1]:.3g}")
            err.ray = ray
            raise err
        return ray
    ang = _rational(theta)
    if ang is None:
        Z = _rays.newton_trace(c, [float(theta)], _float_schedule(_rays.POTENTIAL_FLOOR))[:, 0]
        lv = _float_schedule(_rays.POTENTIAL_FLOOR)
        good = np.isfinite(Z)
        ray = ExternalRay(theta, lv[good], Z[good])
        err = PrecisionFloor("irrational angle: landing cannot be certified in double precision")
        err.ray = ray
        raise err
    bundle = _rays.trace_rational(c, [ang])
    g, z = bundle.polyline(0, include_landing=False)
    ray = ExternalRay(ang, g, z, landing=complex(bundle.landing[0]) if bundle.landed[0] else None,
                      landed=bool(bundle.landed[0]), cauchy_diameter=float(bundle.cauchy_diameter[0]))
    if not ray.landed:
        err = PrecisionFloor(f"ray {ang} did not settle (Cauchy diameter {ray.cauchy_diameter:.3g})")
        err.ray = ray
        raise err
    return ray


def landing_points(c: complex, angles) -> np.ndarray:
    """Landing points of several rational rays (NaN where undecided)."""
    _check_connected(complex(c))
    angles = [_rational(a) for a in angles]
    if any(a is None for a in angles):
        raise ValueError("landing_points needs rational angles")
    bundle = _rays.trace_rational(complex(c), angles)
    return bundle.landing[: len(angles)].copy()


def equipotential(c: complex, R: float, samples: int = 256) -> EquipotentialCurve:
    """Level curve G = log R sampled at equally spaced external angles."""
    if R <= 1:
        raise ValueError("R must exceed 1")
    if samples < 16:
        raise ValueError("need at least 16 samples")
    g = math.log(R)
    levels = _float_schedule(g)
    if levels[0] < _rays.G_START:
        levels = np.concatenate([[_rays.G_START], levels])
    angles = [Fraction(k, samples) for k in range(samples)]
    Z = _rays.newton_trace(complex(c), angles, levels)[-1]
    return EquipotentialCurve(R, Z, np.isfinite(Z))
