"""Iteration of P_c(z) = z**2 + c, fixed points and multiplier classes."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, NotPeriodic

ALGEBRAIC_TOL = 1e-12
ITERATED_TOL = 1e-9
NEUTRAL_BAND = 1e-9
MAX_ROTATION_DENOMINATOR = 64


def escape_radius(c: complex) -> float:
    """Radius beyond which every orbit of z**2 + c escapes monotonically."""
    return max(2.0, abs(c)) + 1.0


def _check_finite(*values):
    for v in values:
        if not cmath.isfinite(complex(v)):
            raise DomainError(f"non-finite input {v!r}")


@dataclass(frozen=True)
class PeriodicPointClass:
    multiplier: complex
    kind: str
    parabolic: bool = False
    rotation: Fraction | None = None
    borderline: bool = False

    @property
    def is_repelling(self) -> bool:
        return self.kind == "repelling"


def classify_multiplier(lam: complex) -> PeriodicPointClass:
    lam = complex(lam)
    r = abs(lam)
    if r <= ALGEBRAIC_TOL:
        return PeriodicPointClass(lam, "super-attractive")
    if abs(r - 1.0) <= NEUTRAL_BAND:
        turns = (cmath.phase(lam) / (2 * math.pi)) % 1.0
        rot = Fraction(turns).limit_denominator(MAX_ROTATION_DENOMINATOR)
        parabolic = abs(float(rot) - turns) <= NEUTRAL_BAND or abs(float(rot) - turns - 1) <= NEUTRAL_BAND
        return PeriodicPointClass(lam, "parabolic" if parabolic else "neutral",
                                  parabolic=parabolic, rotation=rot % 1 if parabolic else None,
                                  borderline=True)
    if r > 1.0:
        return PeriodicPointClass(lam, "repelling")
    return PeriodicPointClass(lam, "attractive")


def _polish_fixed(c: complex, z: complex) -> complex:
    d = 2 * z - 1
    if abs(d) < 1e-6:
        return z
    for _ in range(3):
        step = (z * z + c - z) / d
        z -= step
        d = 2 * z - 1
        if abs(step) < 1e-17:
            break
    return z


def fixed_points(c: complex) -> tuple[complex, complex]:
    """Return ``(beta, alpha)``; beta = (1 + sqrt(1 - 4c))/2 on the principal branch."""
    c = complex(c)
    _check_finite(c)
    s = cmath.sqrt(1 - 4 * c)
    beta = (1 + s) / 2
    alpha = (1 - s) / 2
    if abs(s) > 1e-6:
        beta, alpha = _polish_fixed(c, beta), _polish_fixed(c, alpha)
    return beta, alpha


@dataclass(frozen=True)
class QuadraticParameter:
    c: complex
    beta: complex = field(init=False)
    alpha: complex = field(init=False)
    beta_class: PeriodicPointClass = field(init=False)
    alpha_class: PeriodicPointClass = field(init=False)

    def __post_init__(self):
        c = complex(self.c)
        _check_finite(c)
        beta, alpha = fixed_points(c)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta_class", classify_multiplier(2 * beta))
        object.__setattr__(self, "alpha_class", classify_multiplier(2 * alpha))

    @property
    def parabolic(self) -> bool:
        return abs(self.beta - self.alpha) < 1e-6

    @property
    def escape_radius(self) -> float:
        return escape_radius(self.c)


@dataclass(frozen=True)
class Orbit:
    c: complex
    start: complex
    points: tuple
    escaped: bool
    escape_index: int | None

    def __len__(self):
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)


def iterate(c: complex, z0: complex, n: int) -> Orbit:
    """Orbit z0, P(z0), ..., P^n(z0) with the escape flag for R = max(2,|c|)+1."""
    if n < 0:
        raise DomainError("n must be >= 0")
    c, z = complex(c), complex(z0)
    _check_finite(c, z)
    R = escape_radius(c)
    pts = [z]
    esc = z if abs(z) > R else None
    esc_idx = 0 if esc is not None else None
    for k in range(1, n + 1):
        if not cmath.isfinite(z):
            z = complex(math.inf, 0.0)
        else:
            try:
                z = z * z + c
            except OverflowError:
                z = complex(math.inf, 0.0)
        pts.append(z)
        if esc_idx is None and abs(z) > R:
            esc_idx = k
    return Orbit(c, complex(z0), tuple(pts), esc_idx is not None, esc_idx)


def iterate_map(c: complex, z, n: int):
    """P_c^n applied elementwise (numpy-friendly, no bookkeeping)."""
    for _ in range(n):
        z = z * z + c
    return z


def multiplier(c: complex, z: complex, k: int) -> complex:
    lam = 1 + 0j
    for _ in range(k):
        lam *= 2 * z
        z = z * z + c
    return lam


def classify_periodic(c: complex, z: complex, k: int) -> PeriodicPointClass:
    """Multiplier class of z as a period-k point (k need not be minimal)."""
    if k < 1:
        raise DomainError("period must be >= 1")
    c, z = complex(c), complex(z)
    _check_finite(c, z)
    w = iterate_map(c, z, k)
    if not abs(w - z) <= ITERATED_TOL * max(1.0, abs(z)):
        raise NotPeriodic(f"P^{k}({z!r}) = {w!r} differs from z")
    return classify_multiplier(multiplier(c, z, k))
