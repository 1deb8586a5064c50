"""Brute-force reference computations by exhaustive lattice scans.

Nothing here uses cones, triangulations or generating functions; the only
shared code is scalar and polynomial arithmetic.
"""

from __future__ import annotations

import cmath
import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .arith import Polynomial, YPolynomial
from .errors import GeometryError, ResourceLimitError

DEFAULT_CAP = 10 ** 7


def candidate_cap() -> int:
    raw = os.environ.get("LATTICETODD_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise ResourceLimitError(f"LATTICETODD_CAP is not an integer: {raw!r}") from None


@dataclass(frozen=True)
class BoundingBox:
    lower: tuple
    upper: tuple

    @classmethod
    def around(cls, points):
        pts = list(points)
        n = len(pts[0])
        lo = tuple(math.floor(min(Fraction(p[i]) for p in pts)) for i in range(n))
        hi = tuple(math.ceil(max(Fraction(p[i]) for p in pts)) for i in range(n))
        return cls(lo, hi)

    @property
    def size(self):
        return math.prod(b - a + 1 for a, b in zip(self.lower, self.upper))

    def points(self):
        return itertools.product(*(range(a, b + 1) for a, b in zip(self.lower, self.upper)))


def _halfspaces(region, scale=1):
    """(list of (u, c), vertices) for a polytope or an explicit pair, dilated by ``scale``."""
    if hasattr(region, "facets"):
        facets = [(f.u, f.c) for f in region.facets]
        verts = region.vertices
    else:
        facets, verts = region
        facets = [(tuple(u), Fraction(c)) for u, c in facets]
    s = Fraction(scale)
    return ([(u, s * c) for u, c in facets],
            [tuple(s * Fraction(x) for x in v) for v in verts])


def _pair(u, m):
    return sum(a * b for a, b in zip(u, m))


def _scan(facets, verts):
    box = BoundingBox.around(verts)
    if box.size > candidate_cap():
        raise ResourceLimitError(
            f"bounding box has {box.size} candidates, above the cap {candidate_cap()}")
    for m in box.points():
        vals = [_pair(u, m) + c for u, c in facets]
        if all(v >= 0 for v in vals):
            yield m, vals


def lattice_points(region, strict=(), equal=(), scale=1):
    """Sorted lattice points with <m,u_i> + c_i > 0 for i in strict, = 0 for i in equal."""
    facets, verts = _halfspaces(region, scale)
    strict, equal = set(strict), set(equal)
    out = []
    for m, vals in _scan(facets, verts):
        if any(vals[i] == 0 for i in strict) or any(vals[i] != 0 for i in equal):
            continue
        out.append(m)
    return sorted(out)


def count(region, scale=1) -> int:
    return len(lattice_points(region, scale=scale))


def interior_count(region, scale=1) -> int:
    facets, _ = _halfspaces(region, scale)
    return len(lattice_points(region, strict=range(len(facets)), scale=scale))


def _rank(rows):
    M = [[Fraction(x) for x in r] for r in rows]
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        for i in range(r + 1, len(M)):
            f = M[i][c] / M[r][c]
            M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def _value(f, m):
    if f is None:
        return Fraction(1)
    return f.evaluate(m)


def face_point_sums(P, f=None):
    """Map active set -> sum of f over the lattice points whose active set it is.

    The active set of m determines the face carrying m in its relative
    interior; carrier dimension is n - rank of the active normals.
    """
    facets, verts = _halfspaces(P)
    out = {}
    for m, vals in _scan(facets, verts):
        a = frozenset(i for i, v in enumerate(vals) if v == 0)
        out[a] = out.get(a, 0) + _value(f, m)
    return out


def carrier_dim(P, active) -> int:
    n = P.dim
    if not active:
        return n
    return n - _rank([P.facets[i].u for i in active])


def weighted_face_sum(P, f=None, y=None):
    """Sum over faces E of (1+y)^{dim E} times the sum of f over Relint(E).

    With ``y`` omitted the result is a YPolynomial; otherwise its value.
    """
    total = YPolynomial()
    for a, s in face_point_sums(P, f).items():
        total = total + YPolynomial.one_plus_y_power(carrier_dim(P, a)) * s
    return total if y is None else total(Fraction(y))


def relint_face_sum(P, active, f=None):
    return face_point_sums(P, f).get(frozenset(active), Fraction(0))


def closed_face_sum(P, active, f=None):
    active = frozenset(active)
    return sum((s for a, s in face_point_sums(P, f).items() if a >= active), Fraction(0))


def lattice_sum(P, f=None, strict=(), scale=1):
    return sum((_value(f, m) for m in lattice_points(P, strict=strict, scale=scale)), Fraction(0))


def facets_removed_weighted_sum(P, K, f=None):
    """Weighted sum restricted to faces not lying on any facet of K."""
    K = frozenset(K)
    total = YPolynomial()
    for a, s in face_point_sums(P, f).items():
        if not (a & K):
            total = total + YPolynomial.one_plus_y_power(carrier_dim(P, a)) * s
    return total


# ---------------------------------------------------------------------------
# cones


def _cone_members(generators, v, xi, radius):
    """Lattice points m of v + Cone(generators) with 0 <= <m - v, xi> <= radius."""
    gens = [tuple(int(x) for x in g) for g in generators]
    n = len(v)
    for g in gens:
        if _pair(g, xi) <= 0:
            raise GeometryError("direction is not interior to the dual cone")
    corners = [tuple(Fraction(0) for _ in range(n))]
    corners += [tuple(Fraction(radius, _pair(g, xi)) * x for x in g) for g in gens]
    box = BoundingBox.around(corners)
    if box.size > candidate_cap():
        raise ResourceLimitError("cone scan exceeds the candidate cap")
    k = _rank(gens)
    for x in box.points():
        level = _pair(x, xi)
        if level > radius:
            continue
        if _in_cone(gens, x, k):
            yield tuple(a + b for a, b in zip(x, v)), level, x


def _in_cone(gens, x, k):
    """Is x a nonnegative combination of gens?  Checks every basis of k generators."""
    if not any(x):
        return True
    for subset in itertools.combinations(range(len(gens)), k):
        lam = _solve_combination([gens[i] for i in subset], x)
        if lam is not None and all(c >= 0 for c in lam):
            return True
    return False


def _solve_combination(vectors, x):
    """Coefficients c with sum c_i vectors_i = x, or None."""
    k = len(vectors)
    n = len(x)
    M = [[Fraction(vectors[j][i]) for j in range(k)] + [Fraction(x[i])] for i in range(n)]
    piv = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if M[i][c] != 0), None)
        if p is None:
            return None
        M[r], M[p] = M[p], M[r]
        M[r] = [a / M[r][c] for a in M[r]]
        for i in range(n):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        piv.append(c)
        r += 1
    if any(M[i][k] != 0 for i in range(r, n)):
        return None
    return [M[i][k] for i in range(k)]


@dataclass(frozen=True)
class SeriesEstimate:
    value: complex
    tail: float
    terms: int


def cone_series_numeric(generators, v, z, radius: int) -> SeriesEstimate:
    """Partial sum of e^{<m,z>} over (v + C) cap M, graded by <m - v, -z>.

    The grading uses the primitive integer vector along -z; the tail is
    estimated from the ratio of the last two shells.
    """
    z = [Fraction(a) for a in z]
    den = math.lcm(*(a.denominator for a in z))
    xi = [-int(a * den) for a in z]
    g = math.gcd(*xi)
    xi = [a // g for a in xi]
    shells = [0.0] * (radius + 1)
    total = 0j
    nterms = 0
    for m, level, _ in _cone_members(generators, v, xi, radius):
        w = cmath.exp(float(_pair(m, z)))
        total += w
        shells[level] += abs(w)
        nterms += 1
    last, prev = shells[-1], shells[-2] if radius >= 1 else 0.0
    if prev > 0 and last < prev:
        ratio = last / prev
        tail = last * ratio / (1 - ratio) * (radius + 1)
    else:
        tail = float("inf") if last else 0.0
    return SeriesEstimate(total, tail, nterms)


def graded_cone_counts(generators, xi, count: int, *, weighted=False):
    """Number of lattice points of the cone at each level <m, xi> = 0..count-1.

    With ``weighted`` each point counts (1+y)^s, s = number of nonzero
    coordinates in a basis of generators (simplicial cones only).
    """
    n = len(xi)
    zero = tuple(0 for _ in range(n))
    out = [YPolynomial() if weighted else 0 for _ in range(count)]
    for _, level, x in _cone_members(generators, zero, xi, count - 1):
        if weighted:
            lam = _solve_combination([tuple(g) for g in generators], x)
            s = sum(1 for c in lam if c != 0)
            out[level] = out[level] + YPolynomial.one_plus_y_power(s)
        else:
            out[level] += 1
    return out


# ---------------------------------------------------------------------------
# dilation sums


def riemann_integral_check(P, f, k: int) -> Fraction:
    """(1/k^n) * sum of f over P cap (1/k)M."""
    if not 1 <= k <= 64:
        raise ResourceLimitError("Riemann refinement k must lie in 1..64")
    n = P.dim
    total = Fraction(0)
    for m in lattice_points(P, scale=k):
        total += _value(f, tuple(Fraction(x, k) for x in m))
    return total / Fraction(k) ** n


def dilation_sums(P, f, ks):
    return [lattice_sum(P, f, scale=k) for k in ks]


def lagrange_at(xs, ys, x0):
    """Value at x0 of the interpolating polynomial through (xs, ys)."""
    total = Fraction(0)
    for j, (xj, yj) in enumerate(zip(xs, ys)):
        term = Fraction(yj)
        for i, xi in enumerate(xs):
            if i != j:
                term *= Fraction(x0 - xi, xj - xi)
        total += term
    return total


def dilation_sum_at_zero(P, f):
    """Polynomial k -> sum of f over kP cap M, interpolated from k >= 1 and evaluated at 0."""
    d = f.degree if isinstance(f, Polynomial) else 0
    ks = list(range(1, P.dim + max(d, 0) + 2))
    return lagrange_at(ks, dilation_sums(P, f, ks), 0)
