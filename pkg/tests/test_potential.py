import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadyn.dynamics import fixed_points
from quadyn.errors import DisconnectedJulia, NotEscaping
from quadyn.potential import equipotential, external_angle, green, green_estimate, trace_ray

from conftest import RABBIT


def test_green_examples():
    assert abs(green(0, 2) - math.log(2)) < 1e-12
    assert green(0, 0.5) == 0
    assert abs(green(-2, 3) - math.log((3 + math.sqrt(5)) / 2)) < 1e-9
    assert green_estimate(-1, 0).certified


def test_green_vectorised_matches_scalar():
    z = np.array([2, 0.5, 3j, -1.2 + 0.4j])
    assert np.allclose(green(-1, z), [green(-1, w) for w in z], rtol=0, atol=1e-15)


def test_external_angle_examples():
    assert external_angle(0, 2) == 0
    assert abs(external_angle(0, 2j) - 0.25) < 1e-12
    assert abs(external_angle(-2, 3)) < 1e-9 or abs(external_angle(-2, 3) - 1) < 1e-9
    with pytest.raises(NotEscaping):
        external_angle(-1, 0)


@given(st.floats(0.02, 0.98), st.floats(0.05, 1.0))
def test_angle_doubling(theta, g):
    c = -1
    z = trace_ray(c, theta, g).points[-1]
    d = (external_angle(c, z * z + c) - 2 * external_angle(c, z)) % 1
    assert min(d, 1 - d) < 1e-8


@given(st.floats(1.05, 8), st.floats(0, 2 * math.pi), st.sampled_from([0, -1, -2, 1j, RABBIT]))
def test_green_functional_equation(r, t, c):
    z = r * cmath.exp(1j * t) * max(1, abs(c))
    assert abs(green(c, z * z + c) - 2 * green(c, z)) <= 1e-8


def test_ray_examples():
    ray = trace_ray(0, Fraction(1, 3))
    assert ray.landed and abs(ray.landing - cmath.exp(2j * math.pi / 3)) < 1e-6
    assert np.allclose(np.angle(ray.points), 2 * math.pi / 3, atol=1e-9)
    ray = trace_ray(-1, Fraction(1, 3))
    assert abs(ray.landing - fixed_points(-1)[1]) < 1e-6
    ray = trace_ray(-2, Fraction(1, 2))
    assert abs(ray.landing + 2) < 1e-6


@pytest.mark.parametrize("c", [0, -1, -2, 1j, RABBIT])
def test_ray_equivariance(c):
    rng = np.random.default_rng(3)
    for theta in rng.uniform(0, 1, 8):
        z = trace_ray(c, theta, 0.01).points[-1]
        w = trace_ray(c, (2 * theta) % 1.0, 0.02).points[-1]
        assert abs(z * z + c - w) <= 1e-6


def test_ray_points_on_their_levels():
    ray = trace_ray(-1, Fraction(1, 7))
    sel = ray.potentials > 1e-3
    assert np.all(np.abs(green(-1, ray.points[sel]) - ray.potentials[sel]) <= 1e-6)
    tail = ray.points[-16:]
    assert np.max(np.abs(tail[:, None] - tail[None, :])) < 1e-7


def test_ray_rejects_disconnected_julia_set():
    with pytest.raises(DisconnectedJulia):
        trace_ray(0.5, 0)


@pytest.mark.parametrize("c", [0, -1, -2, 1j])
def test_zero_ray_lands_at_beta(c):
    assert abs(trace_ray(c, 0).landing - fixed_points(c)[0]) < 1e-6


def test_equipotential_examples():
    e = equipotential(0, 2, 64)
    assert e.points.size == 64 and np.allclose(np.abs(e.points), 2, atol=1e-9)
    e = equipotential(-2, math.e, 64)
    x, y = e.points.real, e.points.imag
    a, b = math.e + 1 / math.e, math.e - 1 / math.e
    assert np.allclose((x / a) ** 2 + (y / b) ** 2, 1, atol=1e-8)
    e = equipotential(-1, 4, 32)
    assert np.all(np.abs(green(-1, e.points) - math.log(4)) <= 1e-6)
    with pytest.raises(ValueError):
        equipotential(0, 1.0)
