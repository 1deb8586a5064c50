from fractions import Fraction as F

import pytest

from latticetodd import emops, oracle
from latticetodd.arith import Polynomial, YPolynomial, monomials_up_to
from latticetodd.errors import GeometryError, TruncationError


def mono(n, *exps):
    return Polynomial(n, {tuple(exps): F(1)})


def test_todd_truncation_square(shapes):
    op = emops.todd_operator(shapes["square"], order=2)
    td = (1, F(1, 2), F(1, 12))
    for alpha in monomials_up_to(4, 2):
        expected = 1
        for a in alpha:
            expected *= td[a]
        assert op.coefficient(alpha) == expected
    assert op.constant_term() == 1


def test_dual_truncation_square(shapes):
    op = emops.variant_operator(shapes["square"], "dual", order=2)
    assert op.coefficient((1, 0, 0, 0)) == F(-1, 2)
    assert op.coefficient((2, 0, 0, 0)) == F(1, 12)
    assert op.coefficient((1, 1, 0, 0)) == F(1, 4)


def test_weighted_at_zero_is_todd(shapes):
    P = shapes["hexagon"]
    w = emops.variant_operator(P, "weighted", order=3)
    t = emops.todd_operator(P, order=3)
    for alpha in monomials_up_to(P.num_facets, 3):
        assert YPolynomial.lift(w.coefficient(alpha))(0) == t.coefficient(alpha)


def test_triangle_group_sum(shapes):
    tri = shapes["triangle"]
    chars = emops.global_characters(tri)
    assert len(chars) == 2
    assert sorted(chars[1]) == [0, F(1, 2), F(1, 2)]
    with pytest.raises(GeometryError):
        emops.todd_operator(tri, backend="exact")
    assert emops.todd_operator(tri).field == emops.COMPLEX


def test_apply_square(shapes):
    sq = shapes["square"]
    Q = emops.integral_h_polynomial(sq)
    assert emops.apply(emops.todd_operator(sq), Q) == 4
    assert emops.apply(emops.variant_operator(sq, "dual"), Q) == 0
    identity = emops.OperatorSeries(4, 2, [(F(1), (emops.univariate_factor("one", 0, 2),) * 4)])
    assert emops.apply(identity, Q) == 1
    with pytest.raises(TruncationError):
        emops.apply(emops.todd_operator(sq, order=1), Q)


def test_grid_and_symbolic_agree(shapes):
    P = shapes["triangle"]
    f = mono(2, 1, 1)
    assert emops.integral_h_polynomial(P, f, method="grid") == emops.integral_h_polynomial(P, f)
    Qy = emops.integral_h_polynomial(P, f, y=True)
    Qgy = emops.integral_h_polynomial(P, f, y=True, method="grid")
    assert Qy == Qgy


def test_grid_with_explicit_step(shapes):
    P = shapes["nondelzant3d"]
    Q = emops.integral_h_polynomial(P, method="grid", step=F(1, 7))
    assert Q == emops.integral_h_polynomial(P)


def test_embv_examples(shapes):
    sq = shapes["square"]
    r = emops.em_verify(sq, mono(2, 2, 1), "embv")
    assert r.passed and r.residual == 0 and r.lattice_value == 1
    top = next(i for i, fc in enumerate(sq.facets) if fc.u == (0, -1))
    r = emops.em_verify(sq, None, "facets_removed", K=[top])
    assert r.passed and r.lattice_value == 2
    r = emops.em_verify(sq, None, "facets_removed", K=range(4))
    assert r.passed and r.lattice_value == oracle.interior_count(sq)
    r = emops.em_verify(shapes["big_square"], None, "weighted")
    assert r.passed and r.operator_value.one_plus_y_basis() == (4, 4, 1)


def test_guillemin(shapes):
    r = emops.em_verify(shapes["square"], None, "guillemin")
    assert r.passed and r.operator_value == 4
    r = emops.em_verify(shapes["triangle"], None, "guillemin")
    assert r.passed and abs(r.operator_value - 4) < 1e-12
    r = emops.em_verify(shapes["triangle"], Polynomial.constant(2, 0), "guillemin")
    assert r.passed and r.operator_value == 0


def test_stokes(shapes):
    sq = shapes["square"]
    r = emops.stokes_verify(sq, mono(2, 1, 0), (1, 0))
    assert r.passed and r.operator_value == r.lattice_value == F(1, 2) * 0 + 1
    for m0 in ((1, 0), (0, 1), (2, -3)):
        assert emops.stokes_verify(sq, Polynomial.constant(2, F(1)), m0).operator_value == 0
    assert emops.stokes_verify(shapes["triangle"], mono(2, 0, 1), (0, 1)).passed


def test_pick(shapes):
    r = emops.pick_coefficients(shapes["square"])
    by_dim = {}
    for E in shapes["square"].faces:
        by_dim.setdefault(E.dim, set()).add(r[E.active])
    assert by_dim == {2: {1}, 1: {F(1, 2)}, 0: {F(1, 4)}}
    rep = emops.pick_verify(shapes["triangle"])
    assert rep.passed
    total, signed = rep.operator_value
    assert abs(total - 4) < 1e-12 and abs(signed) < 1e-12


def test_pick_segment():
    from latticetodd.polytope import from_halfspaces
    for N in (1, 3, 7):
        seg = from_halfspaces([((1,), 0), ((-1,), N)])
        r = emops.pick_coefficients(seg)
        assert sorted(r.values()) == [F(1, 2), F(1, 2), 1]
        assert emops.pick_verify(seg).operator_value[0] == N + 1


@pytest.mark.parametrize("f,expected", [
    (lambda n: Polynomial.constant(n, F(1)), 1),
    (lambda n: mono(n, 1, 0), 0),
    (lambda n: mono(n, 1, 0) + mono(n, 0, 1) + 7, 7),
])
def test_vertex_specialization(shapes, f, expected):
    for name in ("square", "triangle", "hexagon"):
        r = emops.vertex_specialization_check(shapes[name], f(2))
        assert r.passed and abs(r.operator_value - expected) < 1e-12


def test_face_derivatives(shapes):
    for name in ("square", "triangle", "nondelzant3d"):
        P = shapes[name]
        f = Polynomial.linear(P.dim, [1] * P.dim, 2)
        assert all(emops.face_derivative_check(P, f, E) for E in P.faces)
        assert emops.disjoint_facets_check(P, f)


def test_weighted_hat_and_faces(shapes):
    P = shapes["hexagon"]
    f = mono(2, 1, 1) + mono(2, 0, 1)
    assert emops.em_verify(P, f, "weighted_hat").passed
    assert emops.em_verify(P, f, "weighted_facets_removed", K=[0, 3]).passed
    for i in range(len(P.faces)):
        assert emops.em_verify(P, f, "weighted_face", face=i).passed
        assert emops.em_verify(P, f, "face_closed", face=i).passed
        assert emops.em_verify(P, f, "face_relint", face=i).passed


def test_minkowski(shapes):
    P = shapes["hexagon"]
    for D in ([0] * 6, [f.c for f in P.facets]):
        assert emops.em_verify(P, None, "minkowski", divisor=D).passed
    with pytest.raises(GeometryError):
        emops.em_verify(P, None, "minkowski", divisor=[1, 0, 0, 0, 0, 1])


def test_local_identities(shapes):
    sq = shapes["square"]
    r = emops.local_em_verify(sq, 0, "todd", (-1, -2), F(1, 2))
    assert r.passed and r.residual < 1e-10
    with pytest.raises(GeometryError):
        emops.local_em_verify(sq, 0, "todd", (1, -2))
    tri = shapes["triangle"]
    singular = tri.vertex_index((1, 0))
    for kind in ("todd", "dual", "weighted"):
        r = emops.local_em_verify(tri, singular, kind, y=F(1, 3))
        assert r.passed and r.params["molien_residual"] < 1e-10


def test_local_scale_shrinks(shapes):
    r = emops.local_em_verify(shapes["square"], 0, "todd", (-1, -2), 8)
    assert r.passed and F(r.params["scale"]) < 8
