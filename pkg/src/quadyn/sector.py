"""Root-like maps: gamma-roots, compatible pairs, hyperbolic neighbourhoods of
the unit interval, the sector angle and the distortion constants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidChain, OutOfDomain, RealInput, SamplingViolation

ANGLE_TOL = 1e-12
PRODUCT_CUTOFF = 1e-12      # truncate the C2 product once lambda^-k drops below this
CERT_GRID = 64
ARG_SLACK = 1e-12


# ----- maps of the class E0 ---------------------------------------------------

class SchlichtMap:
    """A real-symmetric map fixing 0 and 1, univalent off its definition interval."""

    interval = (-math.inf, math.inf)

    def __call__(self, z):
        raise NotImplementedError

    def derivative(self, z):
        raise NotImplementedError

    def inverse(self, w):
        raise NotImplementedError

    def image_interval(self) -> tuple:
        lo, hi = self.interval
        return (self._limit(lo), self._limit(hi))

    def _limit(self, x):
        return float(np.real(self(complex(x)))) if math.isfinite(x) else math.copysign(math.inf, x)

    def in_domain(self, z):
        z = np.asarray(z, dtype=complex)
        lo, hi = self.interval
        return (z.imag != 0) | ((z.real > lo) & (z.real < hi))


class IdentityMap(SchlichtMap):
    def __call__(self, z):
        return np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)

    def derivative(self, z):
        return np.ones_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 1 + 0j

    def inverse(self, w):
        return w


class MobiusMap(SchlichtMap):
    """G(z) = z / ((1 - s) z + s), s > 0: fixes 0 and 1 and preserves UH."""

    def __init__(self, s: float):
        if not s > 0:
            raise DomainError("Mobius parameter s must be positive")
        self.s = float(s)
        if s == 1:
            self.interval = (-math.inf, math.inf)
        else:
            pole = s / (s - 1)
            self.interval = (pole, math.inf) if s < 1 else (-math.inf, pole)

    def __call__(self, z):
        return z / ((1 - self.s) * z + self.s)

    def derivative(self, z):
        return self.s / ((1 - self.s) * z + self.s) ** 2

    def inverse(self, w):
        return self.s * w / (1 - (1 - self.s) * w)

    def _limit(self, x):
        s = self.s
        if math.isinf(x):
            return 1 / (1 - s) if s != 1 else x
        # approaching the pole from inside the interval
        return -math.inf if s < 1 else math.inf


@dataclass(frozen=True)
class GammaRoot(SchlichtMap):
    """L_a(z) = E S_gamma(z - a) + F with S_gamma the principal gamma-root."""
    a: float
    gamma: float
    E: float = field(init=False)
    F: float = field(init=False)

    def __post_init__(self):
        if not self.a <= 0:
            raise DomainError("gamma-root base point a must be <= 0")
        if not self.gamma > 1:
            raise DomainError("gamma must exceed 1")
        r0 = self._root(-self.a).real
        E = 1.0 / (self._root(1.0 - self.a).real - r0)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "F", -r0 * E)

    @property
    def interval(self):
        return (self.a, math.inf)

    def _root(self, u):
        u = np.asarray(u, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(u == 0, 0j, np.exp(np.log(np.where(u == 0, 1, u)) / self.gamma))
        return out if out.ndim else complex(out)

    def __call__(self, z):
        # E (S(z - a) - S(-a)) rather than E S(z - a) + F: exact at 0 and 1
        return self.E * (self._root(np.asarray(z, dtype=complex) - self.a) - self._root(-self.a))

    def derivative(self, z):
        u = np.asarray(z, dtype=complex) - self.a
        return self.E / self.gamma * self._root(u) / u

    def inverse(self, w):
        return self.a + ((np.asarray(w, dtype=complex) - self.F) / self.E) ** self.gamma

    def _limit(self, x):
        return self.F if math.isfinite(x) else math.inf

    def in_domain(self, z):
        z = np.asarray(z, dtype=complex)
        return (z.imag != 0) | (z.real > self.a)


def gamma_root(a: float, gamma: float) -> GammaRoot:
    return GammaRoot(float(a), float(gamma))


# ----- compatible pairs -------------------------------------------------------

@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains_disk(self, other: "Disk", tol: float = 1e-12) -> bool:
        if math.isinf(self.radius):
            return True
        if math.isinf(other.radius):
            return False
        return abs(other.center - self.center) + other.radius <= self.radius + tol


@dataclass(frozen=True)
class CompatiblePair:
    root: GammaRoot
    G: SchlichtMap = field(default_factory=IdentityMap)

    @property
    def a(self) -> float:
        return self.root.a

    @property
    def a_prime(self) -> float:
        return float(np.real(self.G.inverse(complex(self.a))))

    @property
    def b(self) -> float:
        lo, hi = self.G.interval
        return min(self.a_prime - lo, hi - 1.0)

    @property
    def mu(self) -> float:
        return (1 + abs(self.a_prime)) / self.b

    @property
    def nu(self) -> float:
        return (2 * self.mu + 3) ** 4

    @property
    def compatible(self) -> bool:
        lo, hi = self.G.image_interval()
        return lo <= self.a and hi >= 1.0

    def disks(self) -> tuple:
        """(D1, D2, D3): the Koebe disks about [a', 1] and the disk at a'."""
        ap, b = self.a_prime, self.b
        mid = (1 + ap) / 2
        span = 1 + abs(ap)
        d1 = Disk(complex(mid), (span + 2 * b) / 2)
        k = min(span + b, 2 * span)
        d2 = Disk(complex(mid), k / 2)
        d3 = Disk(complex(ap), min(b / 2, span / 2))
        return d1, d2, d3

    def disk4(self) -> Disk:
        """Disk at a of radius d / nu, contained in G(D3) by distortion."""
        d = self.disks()[2].radius
        return Disk(complex(self.a), d / self.nu)

    def __call__(self, z):
        return self.root(self.G(z))


@dataclass(frozen=True)
class RootLikeChain:
    pairs: tuple
    C: float
    lam: float

    @property
    def a(self) -> list:
        return [p.a for p in self.pairs]

    @property
    def mu(self) -> list:
        return [p.mu for p in self.pairs]


def validate_chain(chain: RootLikeChain) -> list:
    """Violations of the root-like conditions (i)-(iii) and of compatibility.

    (i) reads |a_1| >= 1/C: every base point is <= 0, so the sign-free
    reading is the only satisfiable one.
    """
    a, C, lam = chain.a, chain.C, chain.lam
    out = []
    for i, p in enumerate(chain.pairs):
        if not p.compatible:
            out.append(("compatible", i))
    if not a or a[0] != 0:
        out.append(("i", 0))
    if len(a) > 1 and abs(a[1]) < 1 / C:
        out.append(("i", 1))
    n = len(a) - 1
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            bound = max(lam ** (j - i) / C, 1 + (lam - 1) / C) * abs(a[i])
            if abs(a[j]) < bound * (1 - 1e-12):
                out.append(("ii", i, j))
    for i in range(1, n + 1):
        if not chain.pairs[i].mu < C:
            out.append(("iii", i))
    return out


def evaluate_chain(chain: RootLikeChain, z, validate: bool = True):
    """L_n G_n ... L_0 G_0 (z) for z in the upper half-plane (scalar or array)."""
    if validate:
        bad = validate_chain(chain)
        if bad:
            raise InvalidChain(bad)
    scalar = np.ndim(z) == 0
    w = np.atleast_1d(np.asarray(z, dtype=complex))
    for i, p in enumerate(chain.pairs):
        ok = p.G.in_domain(w)
        if not ok.all():
            raise OutOfDomain(i, complex(w[~ok][0]))
        w = np.asarray(p.G(w), dtype=complex)
        ok = p.root.in_domain(w) & np.isfinite(w)
        if not ok.all():
            raise OutOfDomain(i, complex(w[~ok][0]))
        w = np.asarray(p.root(w), dtype=complex)
    return complex(w[0]) if scalar else w


# ----- hyperbolic geometry of C_I = (C minus R) union (0, 1) ------------------

def hyperbolic_nbhd(r: float) -> tuple:
    """(beta, c+, R+) for the neighbourhood {d(z, I) < r} = D+ union D-."""
    if not r > 0:
        raise DomainError("hyperbolic radius must be positive")
    beta = 4 * math.atan(math.exp(-r))
    R = 1 / (2 * math.sin(beta))
    c = complex(0.5, 0.5 / math.tan(beta))
    return beta, c, R


def smallest_nbhd_radius(z: complex) -> float:
    """Euclidean radius R+ of the smallest neighbourhood D+ union D- containing z."""
    z = complex(z)
    if z.imag == 0:
        raise RealInput("z must not be real")
    if z.imag < 0:
        z = z.conjugate()
    return abs(z - 1) / (2 * math.sin(math.atan2(z.imag, z.real)))


def q_chart(z):
    """q(z) = -z^2 / (1 - z^2), a diffeomorphism UH -> C_I."""
    z = np.asarray(z, dtype=complex)
    return -z * z / (1 - z * z)


def q_chart_inverse(w):
    w = np.asarray(w, dtype=complex)
    s = np.sqrt(w / (w - 1))
    return np.where(s.imag < 0, -s, s)


def hyperbolic_distance_CI(w1, w2):
    """Hyperbolic distance in C_I pulled back through q to the upper half-plane."""
    z1, z2 = q_chart_inverse(w1), q_chart_inverse(w2)
    x = np.abs(z1 - z2) / np.abs(z1 - np.conj(z2))
    return 2 * np.arctanh(np.minimum(x, 1.0))


# ----- sector angle and constants ---------------------------------------------

def sector_angle(mu: float, gamma: float) -> float:
    """theta in (0, pi - pi/gamma) with sin t / sin(pi/gamma + t) = (min{1/(2 mu nu), 1/(2 nu)})^(1/gamma)."""
    if not mu >= 0:
        raise DomainError("mu must be positive")
    if not gamma > 1:
        raise DomainError("gamma must exceed 1")
    nu = (2 * mu + 3) ** 4
    rhs = min(1 / (2 * mu * nu) if mu > 0 else math.inf, 1 / (2 * nu)) ** (1 / gamma)
    lo, hi = 0.0, math.pi - math.pi / gamma
    lhs = lambda t: math.sin(t) / math.sin(math.pi / gamma + t)
    while hi - lo > ANGLE_TOL:
        mid = 0.5 * (lo + hi)
        if lhs(mid) < rhs:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sector_residual(theta: float, mu: float, gamma: float) -> float:
    nu = (2 * mu + 3) ** 4
    rhs = min(1 / (2 * mu * nu) if mu > 0 else math.inf, 1 / (2 * nu)) ** (1 / gamma)
    return math.sin(theta) / math.sin(math.pi / gamma + theta) - rhs


def koebe_product(lam: float) -> float:
    """prod_{k>=1} (1 + lam^-k) / (1 - lam^-k), truncated once lam^-k < 1e-12."""
    if not lam > 1:
        raise DomainError("lambda must exceed 1")
    prod, k = 1.0, 1
    while True:
        t = lam ** (-k)
        if t < PRODUCT_CUTOFF:
            break
        prod *= (1 + t) / (1 - t)
        k += 1
    return prod


@dataclass(frozen=True)
class DistortionConstants:
    C: float
    lam: float
    gamma: float
    sigma: float
    C0: float
    C1: float
    tau: float
    m0: int
    n0: int
    C2: float
    C4: float
    C3: float
    C5: float           # may overflow to inf; log10_C5 is always finite
    log10_C3: float
    log10_C5: float


def distortion_constants(C: float, lam: float, gamma: float = 2.0, C0: float | None = None):
    """n0, C2, C3, C5 and the intermediate constants for a root-like map.

    C0 bounds every nu_i; its default (2C + 3)^4 is the Koebe factor nu at
    mu = C.  C4 < 1 is the bound R / (alpha + R) <= C4 of the disk argument,
    made explicit as 1 / sqrt(1 + kappa) with
    kappa = (2 / (C1 C0^2 C max(1, C)))^2.
    """
    if not C > 0:
        raise DomainError("C must be positive")
    sigma = sector_angle(C, gamma)
    if C0 is None:
        C0 = (2 * C + 3) ** 4
    C1 = 2 * (1 + C) / math.sin(sigma)
    tau = min(1.0, 1.0 / (C * C0) ** 2)
    m0 = math.floor(math.log(C1 / tau) / math.log(lam))
    n0 = max(m0 + 1, 0)
    C2 = koebe_product(lam) ** 4
    kappa = (2 / (C1 * C0 ** 2 * C * max(1.0, C))) ** 2
    one_minus = -math.expm1(-0.5 * math.log1p(kappa))     # 1 - C4 without cancellation
    C4 = 1 - one_minus
    log10_C3 = 4 * (math.log10(2 - one_minus) - math.log10(one_minus))
    C3 = 10 ** log10_C3 if log10_C3 < 300 else math.inf
    log10_C5 = math.log10(C2) + n0 * log10_C3
    C5 = C2 * C3 ** n0 if log10_C5 < 300 else math.inf
    return DistortionConstants(C, lam, gamma, sigma, C0, C1, tau, m0, n0, C2, C4, C3, C5,
                               log10_C3, log10_C5)


# ----- certificate ----------------------------------------------------------------

@dataclass(frozen=True)
class ArgumentDistortionCheck:
    pair: int
    N0: float
    min_margin: float      # min of sin(arg G z) - sin(arg z)/N0 over the samples


@dataclass(frozen=True)
class SectorCertificate:
    theta: float
    C: float
    lam: float
    samples: int
    max_arg: float
    violations: int
    argument_checks: tuple


def _uh_grid(n=CERT_GRID):
    r = np.logspace(-3, 3, n)
    phi = np.pi * (np.arange(n) + 0.5) / n
    return (r[None, :] * np.exp(1j * phi[:, None])).ravel()


def _argument_check(i, pair, n=CERT_GRID):
    _, d2, _ = pair.disks()
    rr = d2.radius * np.sqrt((np.arange(n) + 0.5) / n)
    phi = np.pi * (np.arange(n) + 0.5) / n
    z = (d2.center + rr[None, :] * np.exp(1j * phi[:, None])).ravel()
    z = z[z.imag > 0]
    dG = np.abs(pair.G.derivative(z))
    N0 = float(dG.max() / dG.min())
    w = pair.G(z)
    margin = np.sin(np.angle(w)) - np.sin(np.angle(z)) / N0
    return ArgumentDistortionCheck(i, N0, float(margin.min()))


def sector_certificate(chain: RootLikeChain, grid: int = CERT_GRID) -> SectorCertificate:
    """theta* = min_i sector_angle(mu_i, gamma_i), checked on a grid in UH.

    A sample with arg > pi - theta* raises SamplingViolation: the bound is a
    theorem, so a violation points at the evaluation, not at the bound.
    """
    bad = validate_chain(chain)
    if bad:
        raise InvalidChain(bad)
    theta = min(sector_angle(p.mu, p.root.gamma) for p in chain.pairs)
    z = _uh_grid(grid)
    w = evaluate_chain(chain, z, validate=False)
    arg = np.angle(w)
    limit = math.pi - theta
    over = np.nonzero((arg > limit + ARG_SLACK) | (arg < -ARG_SLACK))[0]
    if over.size:
        k = over[0]
        raise SamplingViolation(complex(z[k]), float(arg[k]), limit)
    checks = tuple(_argument_check(i, p, grid) for i, p in enumerate(chain.pairs))
    return SectorCertificate(theta, chain.C, chain.lam, int(z.size), float(arg.max()), 0, checks)


def synthetic_chain(n_pairs: int = 4, lam: float = 2.0, C: float = 1.0, gamma: float = 2.0,
                    s: float = 0.95) -> RootLikeChain:
    """a = 0, -1, -lam, -lam^2, ... with Mobius factors G(z) = z / ((1-s) z + s)."""
    pairs = [CompatiblePair(gamma_root(0.0, gamma), IdentityMap())]
    for i in range(1, n_pairs):
        pairs.append(CompatiblePair(gamma_root(-(lam ** (i - 1)), gamma), MobiusMap(s)))
    return RootLikeChain(tuple(pairs), C, lam)
