from fractions import Fraction

import numpy as np
import pytest

from quadyn.dynamics import fixed_points
from quadyn.errors import AlphaNotRepelling
from quadyn.potential import green
from quadyn.puzzle import Exterior, OnBoundary, PuzzlePiece, alpha_ray_cycle, piece_containing

from conftest import RABBIT


def test_alpha_ray_cycles():
    cyc = alpha_ray_cycle(-1)
    assert cyc.q == 2 and cyc.angles == (Fraction(1, 3), Fraction(2, 3))
    assert max(cyc.landing_residuals) < 1e-6
    cyc = alpha_ray_cycle(RABBIT)
    assert cyc.q == 3 and set(cyc.angles) == {Fraction(1, 7), Fraction(2, 7), Fraction(4, 7)}
    with pytest.raises(AlphaNotRepelling):
        alpha_ray_cycle(0)


def test_original_partition(get_puzzle):
    p = get_puzzle(-1, 3)
    assert len(p.pieces(0)) == 2
    assert piece_containing(p, 0, 0) == p.critical(0)
    other = piece_containing(p, -1, 0)
    assert isinstance(other, PuzzlePiece) and not other.is_critical


def test_critical_chain_nested(get_puzzle):
    p = get_puzzle(-1, 3)
    for n in range(1, 4):
        assert p.parent(p.critical(n)) == p.critical(n - 1)
        assert p.critical(n).is_critical
        inner = p.boundary(p.critical(n))
        outer = p.critical(n - 1)
        inside = p.contains(outer, inner) | (p.boundary_distance(outer, inner) < 1e-6)
        assert inside.all()


def test_membership_flags(get_puzzle):
    p = get_puzzle(-1, 3)
    for n in range(4):
        assert piece_containing(p, 0, n) == p.critical(n)
    assert piece_containing(p, fixed_points(-1)[1], 0) is OnBoundary
    assert piece_containing(p, 10.0, 0) is Exterior


def test_image_map_by_sampling(get_puzzle):
    p = get_puzzle(-2, 2)
    rng = np.random.default_rng(5)
    z = rng.uniform(-2, 2, 400) + 1j * rng.uniform(-0.6, 0.6, 400)
    z = z[green(-2, z) < p.g_level(2) / 4]
    checked = 0
    for w in z:
        piece = piece_containing(p, w, 2)
        image = piece_containing(p, w * w - 2, 1)
        if not isinstance(piece, PuzzlePiece) or not isinstance(image, PuzzlePiece):
            continue
        assert p.image(piece) == image
        checked += 1
    assert checked > 50


def test_every_depth_two_piece_maps_onto_one_piece(get_puzzle):
    p = get_puzzle(-2, 2)
    for piece in p.pieces(2):
        img = p.image(piece)
        assert img.depth == 1
        assert piece in p.children(p.parent(piece))


def test_image_consistency_in_filled_set(get_puzzle):
    p = get_puzzle(-1, 3)
    rng = np.random.default_rng(11)
    z = rng.uniform(-1.7, 1.7, 3000) + 1j * rng.uniform(-0.5, 0.5, 3000)
    z = z[green(-1, z) == 0][:300]
    for w in z:
        piece = piece_containing(p, w, 3)
        image = piece_containing(p, w * w - 1, 2)
        if isinstance(piece, PuzzlePiece) and isinstance(image, PuzzlePiece):
            assert p.image(piece) == image


@pytest.mark.parametrize("c", [-1, -2, RABBIT])
def test_ray_and_vertex_counts(get_puzzle, c):
    p = get_puzzle(c, 4)
    for n in range(5):
        assert p.ray_count(n) == p.q * 2 ** n
        assert p.vertex_count(n) == 2 ** n


@pytest.mark.parametrize("c", [-1, -2, RABBIT])
def test_symmetry(get_puzzle, c):
    # depth 0 is cut by the rays at alpha only; -alpha enters at depth 1
    p = get_puzzle(c, 3)
    for n in range(1, 4):
        crit = p.boundary(p.critical(n))
        mirrored = -crit
        inside = p.contains(p.critical(n), mirrored) | (p.boundary_distance(p.critical(n), mirrored) < 1e-6)
        assert inside.all()
        # the arc sets of the pieces are invariant under theta -> theta + 1/2
        arcs = {frozenset(pc.arcs) for pc in p.pieces(n)}
        half = Fraction(1, 2)
        flipped = {frozenset(((a + half) % 1, (b + half) % 1) for a, b in pc.arcs) for pc in p.pieces(n)}
        assert arcs == flipped


def test_partition_property(get_puzzle):
    p = get_puzzle(-1, 2)
    rng = np.random.default_rng(3)
    z = rng.uniform(-1.7, 1.7, 2000) + 1j * rng.uniform(-0.5, 0.5, 2000)
    z = z[green(-1, z) == 0][:200]
    for w in z:
        hits = sum(bool(p.contains(pc, w)[0]) for pc in p.pieces(2))
        if piece_containing(p, w, 2) is not OnBoundary:
            assert hits == 1


def test_chebyshev_critical_pieces_shrink(get_puzzle):
    p = get_puzzle(-2, 8)
    d = [p.diameter(p.critical(n)) for n in range(1, 9)]
    assert all(b < a for a, b in zip(d, d[1:]))
    # two levels halve the diameter: geometric decrease of the non-renormalizable end
    assert all(d[k + 2] < 0.75 * d[k] for k in range(len(d) - 2))


def test_renormalizable_critical_pieces_do_not_shrink(get_puzzle):
    p = get_puzzle(-1, 8)
    d = [p.diameter(p.critical(n)) for n in range(1, 9)]
    assert min(d) > 0.5
