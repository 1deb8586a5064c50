from fractions import Fraction as F

import pytest

from latticetodd.arith import Polynomial
from latticetodd.errors import (
    NotFullDimensionalError,
    TypeChangeError,
    UnboundedError,
)
from latticetodd.polytope import (
    dilate,
    dilate_y,
    from_halfspaces,
    from_vertices,
    integral_polynomial,
    integrate_polynomial,
    volume,
)


def test_halfspaces_square_and_triangle():
    sq = from_halfspaces([((1, 0), 0), ((-1, 0), 1), ((0, 1), 0), ((0, -1), 1)])
    assert sq.vertices == ((0, 0), (0, 1), (1, 0), (1, 1))
    tri = from_halfspaces([((1, 0), 0), ((0, 1), 0), ((-2, -1), 2)])
    assert set(tri.vertices) == {(0, 0), (1, 0), (0, 2)}


def test_unbounded_and_flat_inputs():
    with pytest.raises(UnboundedError):
        from_halfspaces([((1,), 0)])
    with pytest.raises(UnboundedError):
        from_halfspaces([((1, 0), 0)])
    with pytest.raises(NotFullDimensionalError):
        from_vertices([(0, 0), (2, 0)])


def test_facets_from_vertices():
    t = from_vertices([(0, 0), (1, 0), (0, 1)])
    assert {(f.u, f.c) for f in t.facets} == {((1, 0), 0), ((0, 1), 0), ((-1, -1), 1)}
    tri = from_vertices([(0, 0), (1, 0), (0, 2)])
    assert ((-2, -1), 2) in {(f.u, f.c) for f in tri.facets}


def test_dilation(shapes):
    sq = shapes["square"]
    assert dilate(sq, (0,) * 4).vertices == sq.vertices
    d = dilate(sq, (F(1, 10),) * 4)
    assert set(d.vertices) == {(F(a), F(b)) for a in (F(-1, 10), F(11, 10))
                               for b in (F(-1, 10), F(11, 10))}
    tri = shapes["triangle"]
    dilate(tri, (10, 0, 0))
    with pytest.raises(TypeChangeError):
        dilate(tri, (-1, 0, 0))


def test_y_dilation(shapes):
    sq = shapes["square"]
    assert dilate_y(sq, 0).vertices == sq.vertices
    assert set(dilate_y(sq, 1).vertices) == {(0, 0), (2, 0), (0, 2), (2, 2)}
    pt = dilate_y(shapes["triangle"], -1)
    assert pt.degenerate and pt.vertices == ((0, 0),)


def test_volumes(shapes):
    assert volume(shapes["square"]) == 1
    tri = shapes["triangle"]
    assert volume(tri) == 1
    edge = next(E for E in tri.faces if E.dim == 1 and set(E.vertices) == {(0, 0), (0, 2)})
    assert volume(tri, edge) == 2
    assert all(volume(tri, E) == 1 for E in tri.faces if E.dim == 0)
    assert volume(shapes["nondelzant3d"]) == F(1, 3)


def test_integrals(shapes):
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    assert integrate_polynomial(shapes["square"], Polynomial.constant(2, 1)) == 1
    assert integrate_polynomial(shapes["square"], x) == F(1, 2)
    assert integrate_polynomial(shapes["simplex2"], x * y) == F(1, 24)


def test_simple_and_delzant(shapes):
    assert shapes["square"].is_simple() and shapes["square"].is_delzant()
    assert shapes["triangle"].is_simple() and not shapes["triangle"].is_delzant()
    pyramid = from_vertices([(0, 0, 0), (2, 0, 0), (0, 2, 0), (2, 2, 0), (1, 1, 1)])
    assert not pyramid.is_simple()


def test_integral_polynomial_box(shapes, segment):
    h = [Polynomial.variable(4, i) for i in range(4)]
    sq = shapes["square"]
    Q = integral_polynomial(sq, Polynomial.constant(2, F(1)))
    # facets come out as x >= 0, y >= 0, 1 - y >= 0, 1 - x >= 0
    assert Q == (h[0] + h[3] + 1) * (h[1] + h[2] + 1)
    g = [Polynomial.variable(2, i) for i in range(2)]
    assert integral_polynomial(segment, Polynomial.constant(1, F(1))) == g[0] + g[1] + 1
    tri = shapes["triangle"]
    assert integral_polynomial(tri, Polynomial.constant(2, F(1))).constant_term() == 1


def test_faces_lattice(shapes):
    sq = shapes["square"]
    assert [len(sq.faces_of_dim(d)) for d in range(3)] == [4, 4, 1]
    assert sq.faces[0].dim == 2
