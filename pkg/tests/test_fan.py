from fractions import Fraction as F

import pytest

from latticetodd.arith import solve
from latticetodd.fan import (
    Cone,
    fibration_multiplicities,
    group_data,
    group_data_open,
    half_open_cover,
    multiplicity,
    normal_fan,
    star_fan,
    tangent_cone,
    unimodular_subdivide,
)


def test_normal_fans(shapes):
    fan = normal_fan(shapes["square"])
    assert set(fan.rays) == {(1, 0), (0, 1), (-1, 0), (0, -1)}
    assert len(fan.maximal_cones()) == 4
    assert set(normal_fan(shapes["triangle"]).rays) == {(1, 0), (0, 1), (-2, -1)}
    assert set(normal_fan(shapes["simplex2"]).rays) == {(1, 0), (0, 1), (-1, -1)}


def test_tangent_cones(shapes):
    sq = shapes["square"]
    assert set(tangent_cone(sq, (0, 0)).generators) == {(1, 0), (0, 1)}
    assert set(tangent_cone(sq, (1, 1)).generators) == {(-1, 0), (0, -1)}
    tri = shapes["triangle"]
    assert set(tangent_cone(tri, (1, 0)).generators) == {(-1, 0), (-1, 2)}


@pytest.mark.parametrize("gens,m", [
    ([(1, 0), (0, 1)], 1),
    ([(-1, 0), (-1, 2)], 2),
    ([(1, 1, 0), (0, 1, 1), (1, 0, 1)], 2),
])
def test_multiplicity(gens, m):
    sigma = Cone(gens)
    assert multiplicity(sigma) == m == len(group_data(sigma))


def test_group_characters():
    assert [g.gamma for g in group_data(Cone([(1, 0), (0, 1)]))] == [(0, 0)]
    G = group_data(Cone([(-1, 0), (-1, 2)]))
    assert [g.gamma for g in G] == [(0, 0), (F(1, 2), F(1, 2))]
    assert group_data_open(Cone([(1, 0), (0, 1)])) == ()


def test_subdivisions():
    assert len(unimodular_subdivide(Cone([(1, 0), (0, 1)]))) == 1
    pieces = unimodular_subdivide(Cone([(1, 0), (1, 2)]))
    assert {frozenset(p) for p in pieces} == {frozenset({(1, 0), (1, 1)}),
                                              frozenset({(1, 1), (1, 2)})}
    assert len(unimodular_subdivide(Cone([(1, 0), (1, 4)]))) == 4


def _half_open_contains(piece, m):
    lam = solve([list(c) for c in zip(*piece.generators)], list(m))
    return all(l > 0 if i in piece.removed else l >= 0 for i, l in enumerate(lam))


def test_half_open_cover_is_a_partition():
    sigma = Cone([(1, 0), (1, 2)])
    cover = half_open_cover(sigma)
    assert len(cover) == 2
    removed = [p for p in cover if p.removed]
    assert len(removed) == 1
    for a in range(7):
        for b in range(7):
            hits = sum(_half_open_contains(p, (a, b)) for p in cover)
            assert hits == (1 if sigma.contains((a, b)) else 0)
    smooth = half_open_cover(Cone([(1, 0), (0, 1)]))
    assert len(smooth) == 1 and not smooth[0].removed


def test_star_fans(shapes):
    fan = normal_fan(shapes["square"])
    assert star_fan(fan, frozenset()).dim == 2
    right = next(i for i, u in enumerate(fan.rays) if u == (-1, 0))
    st = star_fan(fan, frozenset({right}))
    assert st.dim == 1 and sorted(st.rays.values()) == [(-1,), (1,)]
    vertex = next(iter(fan.maximal_cones()))
    assert star_fan(fan, vertex).dim == 0


def test_fibrations(shapes):
    sq = shapes["square"]
    fan = normal_fan(sq)
    n_cones = {d: sum(1 for c in fan.cones.values() if c.dim == d) for d in range(3)}
    zero = fibration_multiplicities(sq, [0] * 4)
    assert zero.vertices == ((0, 0),)
    for ell in range(3):
        assert zero.d(frozenset(range(4)), ell) == n_cones[2 - ell]
    ample = fibration_multiplicities(sq, [f.c for f in sq.facets])
    assert len(ample.faces) == len(sq.faces)
    assert all(ample.d(F.active, ell) == (ell == 0) for F in ample.faces for ell in range(3))
    # divisor pulled back from the x-interval
    dx = [0, 0, 0, 1]
    seg = fibration_multiplicities(sq, dx)
    assert set(seg.vertices) == {(0, 0), (1, 0)}
    assert len(seg.faces) == 3
    assert all(seg.alternating_sum(F.active) == 1 for F in seg.faces)
