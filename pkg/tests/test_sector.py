import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadyn.errors import DomainError, InvalidChain, OutOfDomain, RealInput
from quadyn.sector import (CompatiblePair, IdentityMap, MobiusMap, RootLikeChain,
                           distortion_constants, evaluate_chain, gamma_root,
                           hyperbolic_distance_CI, hyperbolic_nbhd, koebe_product, q_chart,
                           q_chart_inverse, sector_angle, sector_certificate, sector_residual,
                           smallest_nbhd_radius, synthetic_chain, validate_chain)

# prod (1 + 2^-k) / (1 - 2^-k) = (-1/2; 1/2)_inf / (1/2; 1/2)_inf, evaluated
# independently with 30-digit q-Pochhammer symbols
KOEBE_PRODUCT_2 = 8.25598793577825006554

upper = st.builds(complex, st.floats(-5, 5), st.floats(0.05, 5))
base_points = st.floats(-50, 0)
gammas = st.floats(1.1, 4)


def test_gamma_root_examples():
    L = gamma_root(0, 2)
    assert (L.E, L.F) == (1.0, 0.0)
    assert L(-1 + 1e-300j) == pytest.approx(1j)
    L = gamma_root(-1, 2)
    assert L.E == pytest.approx(1 / (math.sqrt(2) - 1), abs=1e-12)
    assert L.F == pytest.approx(-L.E, abs=1e-12)


def test_gamma_root_domain():
    with pytest.raises(DomainError):
        gamma_root(0.5, 2)
    with pytest.raises(DomainError):
        gamma_root(-1, 1.0)


@given(base_points, gammas)
def test_gamma_root_normalization(a, gamma):
    L = gamma_root(a, gamma)
    assert abs(L(0)) <= 1e-14
    assert abs(L(1) - 1) <= 1e-14


@given(base_points, gammas, upper)
def test_gamma_root_preserves_upper_half_plane(a, gamma, z):
    assert gamma_root(a, gamma)(z).imag > 0


@given(st.floats(0.05, 20), upper)
def test_mobius_preserves_upper_half_plane(s, z):
    G = MobiusMap(s)
    assert G(z).imag > 0
    assert G(0) == 0 and G(1) == pytest.approx(1)
    assert G.inverse(G(z)) == pytest.approx(z, abs=1e-9)


def test_hyperbolic_nbhd_examples():
    beta, c, R = hyperbolic_nbhd(math.log(1 + math.sqrt(2)))
    assert beta == pytest.approx(math.pi / 2, abs=1e-12)
    assert R == pytest.approx(0.5, abs=1e-12)
    assert abs(c - 0.5) <= 1e-12
    beta, c, R = hyperbolic_nbhd(math.log(1 / math.tan(math.pi / 16)))
    assert beta == pytest.approx(math.pi / 4, abs=1e-12)
    assert R == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert abs(c - (0.5 + 0.5j)) <= 1e-12


def test_hyperbolic_nbhd_asymptotics():
    rs = np.linspace(math.log(1 + math.sqrt(2)), 12, 40)
    vals = [hyperbolic_nbhd(r) for r in rs]
    betas = [v[0] for v in vals]
    radii = [v[2] for v in vals]
    assert np.all(np.diff(betas) < 0) and np.all(np.diff(radii) > 0)
    assert betas[-1] < 1e-4 and radii[-1] > 1e3


def test_smallest_nbhd_radius():
    assert smallest_nbhd_radius(1 + 1j) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert smallest_nbhd_radius(1j) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert smallest_nbhd_radius(1 - 1j) == smallest_nbhd_radius(1 + 1j)
    with pytest.raises(RealInput):
        smallest_nbhd_radius(0.5)


@given(upper)
def test_smallest_nbhd_is_circumradius(z):
    # the neighbourhood's boundary circle passes through 0, 1 and z
    a, b, c = abs(z), abs(z - 1), 1.0
    area = abs(z.imag) / 2
    assert smallest_nbhd_radius(z) == pytest.approx(a * b * c / (4 * area), rel=1e-12)


def test_sector_angle_example():
    theta = sector_angle(1, 2)
    assert theta == pytest.approx(0.0282768, abs=1e-6)
    assert math.tan(theta) == pytest.approx(math.sqrt(1 / 1250), abs=1e-12)
    assert abs(sector_residual(theta, 1, 2)) <= 1e-10


@given(st.floats(0.01, 50), gammas)
def test_sector_angle_bracket_and_residual(mu, gamma):
    theta = sector_angle(mu, gamma)
    assert 0 < theta < math.pi - math.pi / gamma
    assert abs(sector_residual(theta, mu, gamma)) <= 1e-10


def test_sector_angle_decreasing_in_mu():
    mus = np.linspace(0.5, 10, 40)
    thetas = [sector_angle(m, 2) for m in mus]
    assert np.all(np.diff(thetas) < 0)


def test_compatible_pair_disks():
    pair = CompatiblePair(gamma_root(-2, 2), MobiusMap(0.9))
    d1, d2, d3 = pair.disks()
    assert d1.contains_disk(d2) and d2.contains_disk(d3)
    assert pair.compatible
    assert pair.mu == pytest.approx((1 + abs(pair.a_prime)) / pair.b)
    assert pair.nu == pytest.approx((2 * pair.mu + 3) ** 4)
    assert pair.disk4().radius == pytest.approx(d3.radius / pair.nu)


def test_identity_pair_is_compatible_with_infinite_margin():
    pair = CompatiblePair(gamma_root(0, 2))
    assert pair.compatible and math.isinf(pair.b) and pair.mu == 0


def test_incompatible_pair_detected():
    # s > 1 puts the pole on the positive axis, below 1
    pair = CompatiblePair(gamma_root(-2, 2), MobiusMap(2.0))
    assert not pair.compatible


def _chain(a, lam=2.0, C=1.0, s=0.95):
    pairs = [CompatiblePair(gamma_root(a[0], 2), IdentityMap())]
    pairs += [CompatiblePair(gamma_root(x, 2), MobiusMap(s)) for x in a[1:]]
    return RootLikeChain(tuple(pairs), C, lam)


def test_validate_chain_examples():
    assert validate_chain(_chain([0, -1, -2, -4])) == []
    assert ("i", 1) in validate_chain(_chain([0, 0, -2, -4]))
    assert validate_chain(_chain([0, -1, -2, -3])) == [("ii", 1, 3), ("ii", 2, 3)]
    bad = validate_chain(_chain([0, -1, -2, -4], C=0.12))
    assert [v for v in bad if v[0] == "iii"] == [("iii", 2), ("iii", 3)]


def test_evaluate_single_pair():
    chain = RootLikeChain((CompatiblePair(gamma_root(0, 2)),), 1.0, 2.0)
    w = evaluate_chain(chain, 1j)
    assert w == pytest.approx(cmath.exp(1j * math.pi / 4), abs=1e-15)
    assert cmath.phase(w) <= math.pi / 2


def test_evaluate_refuses_invalid_chain():
    with pytest.raises(InvalidChain) as info:
        evaluate_chain(_chain([0, -1, -2, -3]), 1j)
    assert ("ii", 2, 3) in info.value.violations


def test_evaluate_out_of_domain():
    chain = synthetic_chain()
    with pytest.raises(OutOfDomain):
        evaluate_chain(chain, -5.0 + 0j)


@settings(max_examples=40)
@given(upper, upper)
def test_chain_contracts_hyperbolic_distance(z1, z2):
    chain = synthetic_chain()
    w1, w2 = evaluate_chain(chain, np.array([z1, z2]))
    before = hyperbolic_distance_CI(z1, z2)
    after = hyperbolic_distance_CI(w1, w2)
    if before > 1e-6:
        assert after < before


@given(upper)
def test_q_chart_round_trip(z):
    assert complex(q_chart_inverse(q_chart(z))) == pytest.approx(z, rel=1e-9, abs=1e-12)


def test_koebe_product_oracle():
    assert koebe_product(2.0) == pytest.approx(KOEBE_PRODUCT_2, rel=1e-8)
    d = distortion_constants(1.0, 2.0)
    assert d.C2 == pytest.approx(KOEBE_PRODUCT_2 ** 4, rel=1e-8)
    assert d.C2 == pytest.approx(4.646e3, rel=1e-3)


def test_c2_tends_to_one():
    lams = [1.5, 2, 4, 10, 100, 1e4, 1e8]
    c2 = [distortion_constants(1.0, lam).C2 for lam in lams]
    assert np.all(np.diff(c2) < 0)
    assert c2[-1] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("C, lam", [(1.0, 2.0), (0.5, 3.0), (2.0, 1.5), (1.0, 50.0)])
def test_distortion_assembly(C, lam):
    d = distortion_constants(C, lam)
    assert d.n0 == max(d.m0 + 1, 0)
    assert d.sigma == sector_angle(C, 2.0)
    assert d.C1 == pytest.approx(2 * (1 + C) / math.sin(d.sigma))
    assert d.tau == min(1.0, 1 / (C * d.C0) ** 2)
    # 1 - C4 can fall below double precision; the log fields carry it
    assert 0 < d.C4 <= 1 and math.isfinite(d.log10_C3) and d.log10_C3 > 0
    assert d.log10_C5 == pytest.approx(math.log10(d.C2) + d.n0 * d.log10_C3, rel=1e-14)
    if math.isfinite(d.C5):
        assert d.C5 == d.C2 * d.C3 ** d.n0


def test_sector_certificate_synthetic_chain():
    chain = synthetic_chain(4, lam=2.0, C=1.0)
    assert validate_chain(chain) == []
    cert = sector_certificate(chain)
    assert cert.samples == 64 * 64 and cert.violations == 0
    assert cert.theta == min(sector_angle(m, 2) for m in chain.mu)
    assert cert.max_arg <= math.pi - cert.theta
    assert all(chk.min_margin >= 0 for chk in cert.argument_checks)


def test_sector_certificate_single_pair():
    pair = CompatiblePair(gamma_root(0, 2))
    cert = sector_certificate(RootLikeChain((pair,), 1.0, 2.0))
    assert cert.theta == sector_angle(pair.mu, 2)


def test_sampled_arguments_stay_in_sector():
    chain = synthetic_chain()
    theta = sector_certificate(chain).theta
    rng = np.random.default_rng(7)
    z = rng.uniform(-10, 10, 1000) + 1j * rng.uniform(1e-3, 10, 1000)
    assert np.angle(evaluate_chain(chain, z)).max() <= math.pi - theta
