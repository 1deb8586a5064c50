"""Exponential-rational generating functions of cones and polytopes.

Convention: a lattice point m contributes e^{<m,z>}.  A term is

    weight * e^{2 pi i phase} * e^{<a,z>} / prod_k (1 - e^{2 pi i gamma_k} e^{<b_k,z>})

with ``weight`` a YPolynomial in y.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import (
    LaurentSeries,
    SpanLattice,
    YPolynomial,
    det,
    dot,
    exp_series,
    interpolate_univariate,
    inverse,
    inverse_one_minus_root_exp,
    laurent_inverse_one_minus_exp,
    root_of_unity,
)
from .errors import ConvergenceError, GeometryError
from .fan import Cone, group_data, half_open_cover, unimodular_subdivide
from .polytope import LatticePolytope, dilate_y, from_vertices

ONE = YPolynomial((1,))


@dataclass(frozen=True)
class ExpTerm:
    weight: YPolynomial
    a: tuple
    dens: tuple
    phase: Fraction = Fraction(0)
    den_phases: tuple = ()

    def __post_init__(self):
        if not self.den_phases:
            object.__setattr__(self, "den_phases", tuple(Fraction(0) for _ in self.dens))
        for b in self.dens:
            if not any(b):
                raise GeometryError("denominator vector is zero")

    @property
    def has_phases(self):
        return bool(self.phase) or any(self.den_phases)

    def scaled(self, c):
        return ExpTerm(self.weight * c, self.a, self.dens, self.phase, self.den_phases)


class ExpRationalSum:
    """A finite formal sum of ExpTerms."""

    def __init__(self, terms=(), dim=None):
        self.terms = tuple(terms)
        self.dim = dim if dim is not None else (len(self.terms[0].a) if self.terms else 0)

    def __add__(self, other):
        return ExpRationalSum(self.terms + other.terms, self.dim or other.dim)

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        return ExpRationalSum((t.scaled(c) for t in self.terms), self.dim)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def denominators(self):
        return {b for t in self.terms for b in t.dens}

    @property
    def has_phases(self):
        return any(t.has_phases for t in self.terms)


def _vec(v):
    return tuple(Fraction(x) for x in v)


# ---------------------------------------------------------------------------
# cones


@lru_cache(maxsize=4096)
def _cone_pieces(generators, side, ambient_dim):
    C = Cone(generators, side, ambient_dim, reduce=False)
    if not C.pointed:
        raise GeometryError(f"{C!r} is not pointed")
    return tuple(half_open_cover(C, unimodular_subdivide(C)))


def cone_exp_sum(C: Cone, v) -> ExpRationalSum:
    """Sum of e^{<m,z>} over (v + C) cap M, one term per half-open unimodular piece."""
    v = _vec(v)
    out = []
    for piece in _cone_pieces(C.generators, C.side, C.ambient_dim):
        a = list(v)
        for i in piece.removed:
            a = [x + y for x, y in zip(a, piece.generators[i])]
        out.append(ExpTerm(ONE, tuple(a), tuple(piece.generators)))
    return ExpRationalSum(out, len(v))


def relint_exp_sum(F: Cone, v) -> ExpRationalSum:
    """Sum over v + Relint(F), by inclusion-exclusion over the faces of F."""
    v = _vec(v)
    if F.dim == 0:
        return ExpRationalSum([ExpTerm(ONE, v, ())], len(v))
    out = ExpRationalSum((), len(v))
    for idx in F.face_index_sets:
        G = F.face(idx)
        part = cone_exp_sum(G, v)
        out = out + (part if (F.dim - G.dim) % 2 == 0 else -part)
    return out


def _vertex_edges(P: LatticePolytope, vid):
    """(edge face, primitive direction) for the edges at a vertex."""
    vert = P.vertices[vid]
    out = []
    for E in P.faces_of_dim(1):
        if vid in E.vertex_ids:
            other = next(P.vertices[i] for i in E.vertex_ids if i != vid)
            d = tuple(a - b for a, b in zip(other, vert))
            g = math.lcm(*(x.denominator for x in d))
            d = tuple(int(x * g) for x in d)
            k = math.gcd(*d)
            out.append((E, tuple(x // k for x in d)))
    return out


def vertex_cone(P: LatticePolytope, vid) -> Cone:
    return Cone([d for _, d in _vertex_edges(P, vid)], "M", P.dim, reduce=False)


def face_cone_at_vertex(P: LatticePolytope, vid, face) -> Cone:
    """E_v = Cone(E - v): generated by the edges at v lying in the face."""
    gens = [d for E, d in _vertex_edges(P, vid) if E.active >= face.active]
    return Cone(gens, "M", P.dim, reduce=False)


def vertex_sums(P: LatticePolytope) -> ExpRationalSum:
    out = ExpRationalSum((), P.dim)
    for vid, v in enumerate(P.vertices):
        out = out + cone_exp_sum(vertex_cone(P, vid), v)
    return out


def weighted_vertex_sum(P: LatticePolytope, v) -> ExpRationalSum:
    """Sum over faces E containing v of (1+y)^{dim E} * relint sum of v + E_v."""
    vid = P.vertex_index(v)
    v = P.vertices[vid]
    out = ExpRationalSum((), P.dim)
    for F in P.faces_containing_vertex(vid):
        part = relint_exp_sum(face_cone_at_vertex(P, vid, F), v)
        out = out + part.scaled(YPolynomial.one_plus_y_power(F.dim))
    return out


def interior_vertex_sums(P: LatticePolytope) -> ExpRationalSum:
    out = ExpRationalSum((), P.dim)
    for vid, v in enumerate(P.vertices):
        out = out + relint_exp_sum(vertex_cone(P, vid), v)
    return out


# ---------------------------------------------------------------------------
# evaluation


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def direction(n: int, index: int = 0):
    p = _PRIMES[index % len(_PRIMES)] + (index // len(_PRIMES)) * 100
    return tuple(p ** k for k in range(n))


def generic_direction(S: ExpRationalSum, seed: int = 0, attempts: int = 40):
    """First xi = (1, p, p^2, ...) (p prime, from position ``seed``) generic for S."""
    dens = S.denominators
    for k in range(attempts):
        xi = direction(S.dim, seed + k)
        if all(dot(b, xi) != 0 for b in dens):
            return xi
    raise ConvergenceError("no generic direction found; the sum has too many denominators")


def check_generic(S: ExpRationalSum, xi):
    bad = sorted(b for b in S.denominators if dot(b, xi) == 0)
    if bad:
        raise GeometryError(f"direction {tuple(xi)} is orthogonal to denominator {bad[0]}")


def _term_series(t: ExpTerm, xi, order: int) -> LaurentSeries:
    k = len(t.dens)
    sub = order + k
    s = exp_series(dot(t.a, xi), sub)
    if t.phase:
        s = s * root_of_unity(t.phase)
    for b, g in zip(t.dens, t.den_phases):
        beta = dot(b, xi)
        if g:
            f = inverse_one_minus_root_exp(root_of_unity(g), beta, sub)
        else:
            f = laurent_inverse_one_minus_exp(beta, sub)
        s = s * f
    return LaurentSeries(s.low, (s[j] for j in range(s.low, order + 1)), order)


def evaluate(S: ExpRationalSum, xi, order: int, y=None) -> LaurentSeries:
    """Laurent expansion in t of S at z = t * xi.

    Coefficients are YPolynomials (complex-valued when roots of unity
    occur); a numeric ``y`` is substituted instead when given.
    """
    check_generic(S, xi)
    groups = {}
    for t in S.terms:
        groups.setdefault(t.weight, []).append(t)
    low = -max((len(t.dens) for t in S.terms), default=0)
    total = LaurentSeries(low, (), order)
    for w, terms in groups.items():
        acc = LaurentSeries(low, (), order)
        for t in terms:
            acc = acc + _term_series(t, xi, order)
        factor = w if y is None else w(Fraction(y) if not isinstance(y, complex) else y)
        total = total + acc * factor
    if y is None:
        total = LaurentSeries(total.low, (YPolynomial.lift(c) for c in total.coeffs), order)
    return total


def evaluate_at(S: ExpRationalSum, z, y=0) -> complex:
    """Numeric value of S at the point z."""
    total = 0j
    for t in S.terms:
        val = complex(t.weight(y)) * cmath.exp(float(dot(t.a, z)))
        if t.phase:
            val *= root_of_unity(t.phase)
        for b, g in zip(t.dens, t.den_phases):
            den = 1 - root_of_unity(g) * cmath.exp(float(dot(b, z)))
            if abs(den) < 1e-300:
                raise GeometryError(f"pole of denominator {b} at the evaluation point")
            val /= den
        total += val
    return total


@dataclass(frozen=True)
class GradedSeries:
    """Coefficients of q^0..q^{count-1} of S at z = -s*xi, q = e^{-s}."""

    coefficients: tuple
    fractional_residual: float
    max_imag: float


def graded_coefficients(S: ExpRationalSum, xi, count: int, y=None) -> GradedSeries:
    """Expand S in powers of q^{1/D}; requires <b, xi> > 0 for every denominator.

    With ``y`` None, coefficients are YPolynomials (complex coefficients if
    roots of unity occur).
    """
    D = 1
    for t in S.terms:
        for v in (t.a,) + t.dens:
            D = math.lcm(D, dot(v, xi).denominator if isinstance(dot(v, xi), Fraction) else 1)
    L = (count - 1) * D + 1
    exact = not S.has_phases
    zero = Fraction(0) if exact else 0j
    by_power = {}
    for t in S.terms:
        start = dot(t.a, xi) * D
        if Fraction(start).denominator != 1 or start < 0:
            raise GeometryError("numerator exponent is not a nonnegative grading")
        arr = [zero] * L
        if start < L:
            arr[int(start)] = Fraction(1) if exact else root_of_unity(t.phase)
        for b, g in zip(t.dens, t.den_phases):
            e = dot(b, xi) * D
            if e <= 0:
                raise GeometryError(f"denominator {b} is not positive on the grading")
            e = int(e)
            zeta = Fraction(1) if exact else root_of_unity(g)
            for i in range(e, L):
                if arr[i - e]:
                    arr[i] += zeta * arr[i - e]
        weights = t.weight.coeffs if y is None else (t.weight(Fraction(y)),)
        for p, w in enumerate(weights):
            if w == 0:
                continue
            acc = by_power.setdefault(p, [zero] * L)
            for i, x in enumerate(arr):
                if x:
                    acc[i] += w * x
    frac = 0.0
    for acc in by_power.values():
        for i, x in enumerate(acc):
            if i % D:
                frac = max(frac, abs(x))
    imag = 0.0
    coeffs = []
    for k in range(count):
        cs = [by_power.get(p, [zero] * L)[k * D] for p in range(max(by_power, default=-1) + 1)]
        if not exact:
            imag = max([imag] + [abs(complex(c).imag) for c in cs])
        coeffs.append(YPolynomial(cs) if y is None else (cs[0] if cs else zero))
    return GradedSeries(tuple(coeffs), frac, imag)


# ---------------------------------------------------------------------------
# counts


def _constant_term(S: ExpRationalSum, n: int, seed: int):
    xi = generic_direction(S, seed)
    series = evaluate(S, xi, 0)
    for k in range(1, n + 1):
        if series[-k] != 0:
            raise ConvergenceError(f"pole of order {k} does not cancel along {xi}")
    return series[0]


def brion_count(P: LatticePolytope, seed: int = 0) -> int:
    """|P cap M| from the vertex cone generating functions."""
    if P.degenerate:
        return 1 if all(x.denominator == 1 for x in P.vertices[0]) else 0
    c = _constant_term(vertex_sums(P), P.dim, seed)
    return _as_int(c.coefficient(0))


def brion_interior_count(P: LatticePolytope, seed: int = 0) -> int:
    if P.degenerate:
        return 1
    c = _constant_term(interior_vertex_sums(P), P.dim, seed)
    return _as_int(c.coefficient(0))


def _as_int(x):
    x = Fraction(x)
    if x.denominator != 1:
        raise ConvergenceError(f"count {x} is not an integer")
    return int(x)


def weighted_brion(P: LatticePolytope, seed: int = 0) -> YPolynomial:
    """Sum over faces E of (1+y)^{dim E} |Relint(E) cap M|."""
    if P.degenerate:
        return ONE
    S = ExpRationalSum((), P.dim)
    for v in P.vertices:
        S = S + weighted_vertex_sum(P, v)
    return _constant_term(S, P.dim, seed)


def pole_parts(P: LatticePolytope, xi, *, weighted=False):
    """Coefficients of t^{-1}..t^{-n} of the summed Brion series along xi."""
    if weighted:
        S = ExpRationalSum((), P.dim)
        for v in P.vertices:
            S = S + weighted_vertex_sum(P, v)
    else:
        S = vertex_sums(P)
    series = evaluate(S, xi, 0)
    return tuple(series[-k] for k in range(1, P.dim + 1))


def span_polytope(points) -> LatticePolytope | None:
    """Integral points as a full-dimensional polytope in their span lattice (None for a point)."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    base = pts[0]
    lat = SpanLattice([tuple(a - b for a, b in zip(p, base)) for p in pts[1:]], len(base))
    if lat.rank == 0:
        return None
    return from_vertices([lat.coords(tuple(a - b for a, b in zip(p, base))) for p in pts])


def relint_count(points) -> int:
    """Lattice points in the relative interior of conv(points)."""
    Q = span_polytope(points)
    return 1 if Q is None else brion_interior_count(Q)


# ---------------------------------------------------------------------------
# Molien-type local sums over the finer lattice M'


def dual_basis(sigma: Cone):
    """Rational m'_i with <m'_i, u_j> = delta_ij for a full-dimensional simplicial cone."""
    if not sigma.simplicial or sigma.dim != sigma.ambient_dim:
        raise GeometryError("Molien sums need a full-dimensional simplicial cone")
    inv = inverse(sigma.generators)
    n = sigma.dim
    return tuple(tuple(inv[j][i] for j in range(n)) for i in range(n))


def facets_removed_cone_sum(sigma: Cone, K=()) -> ExpRationalSum:
    """(1/|G|) sum_g prod_i f_i(a_i(g) X_i), X_i = e^{<m'_i, z>}.

    f_i(x) = (1+y)x/(1-x) for i in K and (1+y x)/(1-x) otherwise.
    """
    mprime = dual_basis(sigma)
    G = group_data(sigma)
    n = sigma.dim
    K = frozenset(K)
    free = [i for i in range(n) if i not in K]
    out = []
    inv_order = Fraction(1, len(G))
    base_weight = YPolynomial.one_plus_y_power(len(K)) * inv_order
    for g in G:
        dens = mprime
        for r in range(len(free) + 1):
            for S in itertools.combinations(free, r):
                chosen = sorted(K | set(S))
                a = tuple(sum((mprime[i][j] for i in chosen), Fraction(0)) for j in range(n))
                phase = sum((g.gamma[i] for i in chosen), Fraction(0))
                phase -= math.floor(phase)
                w = base_weight * YPolynomial((0,) * r + (1,))
                out.append(ExpTerm(w, a, dens, phase, g.gamma))
    return ExpRationalSum(out, n)


def molien_sum(sigma: Cone) -> ExpRationalSum:
    return facets_removed_cone_sum(sigma, ())


# ---------------------------------------------------------------------------
# continuous analogue


@dataclass(frozen=True)
class ContinuousTerm:
    """coef * e^{<a,z>} / prod_i <w_i, z>."""

    coef: Fraction
    a: tuple
    dens: tuple


def continuous_brion(P: LatticePolytope):
    """Vertex terms whose sum is the integral of e^{<m,z>} over P."""
    out = []
    n = P.dim
    for vid, v in enumerate(P.vertices):
        C = vertex_cone(P, vid)
        for gens in unimodular_subdivide(C) if not C.simplicial else [C.generators]:
            coef = abs(Fraction(det(gens))) * (-1) ** n
            out.append(ContinuousTerm(coef, v, tuple(gens)))
    return tuple(out)


def continuous_series(terms, xi, order: int) -> LaurentSeries:
    """Expansion along z = t*xi of a continuous Brion sum."""
    if not terms:
        return LaurentSeries.zero(order)
    n = len(terms[0].dens)
    total = LaurentSeries(-n, (), order)
    for t in terms:
        den = math.prod(dot(w, xi) for w in t.dens)
        if den == 0:
            raise GeometryError("direction is orthogonal to an edge")
        e = exp_series(dot(t.a, xi), order + n)
        s = LaurentSeries(-n, e.coeffs, order) * (t.coef / den)
        total = total + s
    return total


def continuous_moment(P: LatticePolytope, xi, k: int) -> Fraction:
    """Integral of <m, xi>^k over P from the continuous vertex sum."""
    series = continuous_series(continuous_brion(P), xi, k)
    return series[k] * math.factorial(k)


# ---------------------------------------------------------------------------
# polynomials in the dilation factor


def ehrhart_polynomial(P: LatticePolytope, seed: int = 0) -> tuple:
    """Coefficients (ascending in l) of l -> |lP cap M|, from l = 1..n+1."""
    ls = list(range(1, P.dim + 2))
    counts = [brion_count(P.scaled(ell), seed) for ell in ls]
    return interpolate_univariate(ls, counts)


def chi_y_polynomial(P: LatticePolytope, seed: int = 0) -> tuple:
    """Coefficients (ascending in k = 1+y) of k -> |P_y cap M|, from k = 1..n+1."""
    ks = list(range(1, P.dim + 2))
    counts = [brion_count(dilate_y(P, k - 1), seed) for k in ks]
    return interpolate_univariate(ks, counts)


def polynomial_value(coeffs, x):
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


# ---------------------------------------------------------------------------
# nef divisors


def fibration_weighted_count(data) -> YPolynomial:
    """sum over faces E' of [sum_l (-1)^l d_l (1+y)^{l + dim E'}] |Relint(E') cap M|."""
    total = YPolynomial()
    for F in data.faces:
        inner = YPolynomial()
        for (a, ell), c in data.multiplicities.items():
            if a == F.active:
                inner = inner + YPolynomial.one_plus_y_power(ell + F.dim) * ((-1) ** ell * c)
        total = total + inner * relint_count(F.vertices)
    return total
