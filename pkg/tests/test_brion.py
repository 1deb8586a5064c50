import cmath
from fractions import Fraction as F

import pytest

from latticetodd import brion, oracle
from latticetodd.arith import YPolynomial
from latticetodd.fan import Cone

ALL = ["square", "box", "big_square", "simplex2", "triangle", "hexagon", "simplex3", "cube",
       "nondelzant3d"]


def test_cone_sums_closed_forms():
    z = (F(-1, 3),)
    val = brion.evaluate_at(brion.cone_exp_sum(Cone([(1,)]), (0,)), z)
    assert abs(val - 1 / (1 - cmath.exp(-1 / 3))) < 1e-12
    rel = brion.evaluate_at(brion.relint_exp_sum(Cone([(1,)]), (0,)), z)
    assert abs(rel - (val - 1)) < 1e-12
    z2 = (F(-1, 2), F(-1, 5))
    quad = brion.evaluate_at(brion.cone_exp_sum(Cone([(1, 0), (0, 1)]), (0, 0)), z2)
    assert abs(quad - 1 / ((1 - cmath.exp(-0.5)) * (1 - cmath.exp(-0.2)))) < 1e-12


def test_graded_cone_series():
    S = brion.cone_exp_sum(Cone([(1, 0), (1, 2)]), (0, 0))
    g = brion.graded_coefficients(S, (1, 0), 8, y=0)
    assert list(g.coefficients) == [2 * k + 1 for k in range(8)]


def test_relint_of_quadrant_matches_box_count():
    S = brion.relint_exp_sum(Cone([(1, 0), (0, 1)]), (0, 0))
    g = brion.graded_coefficients(S, (1, 1), 11, y=0)
    # points (a, b) with a, b >= 1 and a + b <= 10: 1 + 2 + ... + 9
    assert sum(g.coefficients) == 45


def test_segment_brion_sum(segment):
    S = brion.vertex_sums(segment)
    series = brion.evaluate(S, (1,), 2)
    assert series[-1] == 0 and series[0] == 2


@pytest.mark.parametrize("name", ALL)
def test_counts_match_oracle(shapes, name):
    P = shapes[name]
    assert brion.brion_count(P) == oracle.count(P)
    assert brion.brion_interior_count(P) == oracle.interior_count(P)
    assert brion.weighted_brion(P) == oracle.weighted_face_sum(P)


def test_named_counts(shapes):
    assert brion.brion_count(shapes["square"]) == 4
    assert brion.brion_count(shapes["triangle"]) == 4
    assert brion.brion_count(shapes["box"]) == 12
    assert brion.weighted_brion(shapes["square"]) == 4
    assert brion.weighted_brion(shapes["big_square"]).one_plus_y_basis() == (4, 4, 1)
    assert brion.weighted_brion(shapes["triangle"]) == YPolynomial((4, 1))


@pytest.mark.parametrize("name", ["triangle", "hexagon", "nondelzant3d"])
def test_poles_cancel(shapes, name):
    P = shapes[name]
    for k in range(3):
        xi = brion.generic_direction(brion.vertex_sums(P), k)
        assert all(c == 0 for c in brion.pole_parts(P, xi))
        assert all(c == 0 for c in brion.pole_parts(P, xi, weighted=True))


def test_weighted_vertex_sum_square_origin(shapes):
    S = brion.weighted_vertex_sum(shapes["square"], (0, 0))
    z = (F(-1, 2), F(-1, 3))
    a, b = cmath.exp(-0.5), cmath.exp(-1 / 3)
    y = F(1, 3)
    expected = 1 + (1 + y) * (a / (1 - a) + b / (1 - b)) + (1 + y) ** 2 * a * b / ((1 - a) * (1 - b))
    assert abs(brion.evaluate_at(S, z, y) - expected) < 1e-12
    assert abs(brion.evaluate_at(S, z, 0) - 1 / ((1 - a) * (1 - b))) < 1e-12


def test_molien_sums():
    sigma = Cone([(2, -1), (0, 1)])
    g = brion.graded_coefficients(brion.molien_sum(sigma), (1, 0), 6, y=0)
    counts = oracle.graded_cone_counts([(1, 0), (1, 2)], (1, 0), 6)
    assert [round(c.real, 9) for c in g.coefficients] == counts
    smooth = brion.molien_sum(Cone([(1, 0), (0, 1)]))
    z = (F(-1, 2), F(-1, 3))
    a, b = cmath.exp(-0.5), cmath.exp(-1 / 3)
    assert abs(brion.evaluate_at(smooth, z) - 1 / ((1 - a) * (1 - b))) < 1e-12
    ray = brion.facets_removed_cone_sum(Cone([(1,)]), [0])
    assert abs(brion.evaluate_at(ray, (F(-1, 2),)) - a / (1 - a)) < 1e-12


def test_continuous_volume(shapes, segment):
    assert brion.continuous_moment(segment, (1,), 0) == 1
    for name in ("square", "triangle"):
        assert brion.continuous_moment(shapes[name], (1, 3), 0) == 1


@pytest.mark.parametrize("name,coeffs", [
    ("square", (1, 2, 1)),
    ("triangle", (1, 2, 1)),
    ("simplex2", (1, F(3, 2), F(1, 2))),
])
def test_ehrhart(shapes, name, coeffs):
    assert brion.ehrhart_polynomial(shapes[name]) == coeffs


def test_chi_y(shapes):
    P = shapes["square"]
    c = brion.chi_y_polynomial(P)
    assert c == (1, 2, 1)
    assert brion.polynomial_value(c, 1) == oracle.count(P)
    for name in ("triangle", "nondelzant3d"):
        P = shapes[name]
        c = brion.chi_y_polynomial(P)
        assert brion.polynomial_value(c, 0) == 1
        assert brion.polynomial_value(c, -1) == (-1) ** P.dim * oracle.interior_count(P)
