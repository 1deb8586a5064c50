"""Lattice polytopes: H/V representations, face lattice, dilations, integration."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .arith import (
    Polynomial,
    SpanLattice,
    det,
    dot,
    inverse,
    nullspace,
    integral_multiple,
    rank,
    solve,
)
from .errors import (
    EmptyRegionError,
    GeometryError,
    NotFullDimensionalError,
    NotSimpleError,
    ResourceLimitError,
    TypeChangeError,
    UnboundedError,
)

MAX_DIM = 4
MAX_FACETS = 32
MAX_VERTICES = 64


@dataclass(frozen=True)
class Facet:
    """The halfspace <m, u> + c >= 0 with primitive inward normal u."""

    u: tuple
    c: Fraction

    def value(self, m):
        return dot(self.u, m) + self.c


@dataclass(frozen=True, eq=False)
class Face:
    """A face of a polytope, identified by the set of facets containing it."""

    active: frozenset
    dim: int
    vertex_ids: tuple
    vertices: tuple
    lattice: SpanLattice = field(repr=False)

    @property
    def base(self):
        return self.vertices[0]

    @property
    def basis(self):
        return self.lattice.basis

    def __eq__(self, other):
        return isinstance(other, Face) and self.active == other.active and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.active, self.vertices))


def _facet_from_halfspace(u, c):
    u = tuple(int(x) for x in u)
    g = math.gcd(*u)
    if g == 0:
        raise GeometryError("zero normal vector")
    return Facet(tuple(x // g for x in u), Fraction(c) / g)


class LatticePolytope:
    """Convex polytope {m : <m, u_i> + c_i >= 0} with its vertices and faces.

    Instances are immutable.  Dilated regions with rational vertices are the
    same type with ``is_lattice`` false.
    """

    def __init__(self, facets, vertices, vertex_active, *, degenerate=False):
        self.facets = tuple(facets)
        self.vertices = tuple(tuple(Fraction(x) for x in v) for v in vertices)
        self.vertex_active = tuple(frozenset(a) for a in vertex_active)
        self.dim = len(self.facets[0].u) if self.facets else len(self.vertices[0])
        self.degenerate = degenerate

    # -- basic data -------------------------------------------------------

    @property
    def num_facets(self):
        return len(self.facets)

    @property
    def normals(self):
        return tuple(f.u for f in self.facets)

    @property
    def offsets(self):
        return tuple(f.c for f in self.facets)

    @property
    def full_dimensional(self):
        return not self.degenerate

    @property
    def is_lattice(self):
        return all(x.denominator == 1 for v in self.vertices for x in v)

    def contains(self, m, strict=()):
        for i, f in enumerate(self.facets):
            val = f.value(m)
            if val < 0 or (i in strict and val == 0):
                return False
        return True

    def vertex_index(self, point):
        point = tuple(Fraction(x) for x in point)
        try:
            return self.vertices.index(point)
        except ValueError:
            raise GeometryError(f"{point} is not a vertex") from None

    # -- face lattice -----------------------------------------------------

    @cached_property
    def faces(self):
        """All nonempty faces, the polytope itself first, then by decreasing dimension."""
        actives = set(self.vertex_active)
        frontier = set(actives)
        while frontier:
            new = set()
            for a in frontier:
                for b in actives:
                    c = a & b
                    if c not in actives:
                        new.add(c)
            actives |= new
            frontier = new
        faces = [self._make_face(a) for a in actives]
        faces.sort(key=lambda F: (-F.dim, sorted(F.active)))
        return tuple(faces)

    def _make_face(self, active):
        ids = tuple(i for i, va in enumerate(self.vertex_active) if active <= va)
        pts = tuple(self.vertices[i] for i in ids)
        diffs = [tuple(x - y for x, y in zip(p, pts[0])) for p in pts[1:]]
        lattice = SpanLattice(diffs, self.dim)
        return Face(frozenset(active), lattice.rank, ids, pts, lattice)

    @cached_property
    def _face_index(self):
        return {F.active: F for F in self.faces}

    def face(self, active) -> Face:
        try:
            return self._face_index[frozenset(active)]
        except KeyError:
            raise GeometryError(f"no face with active facet set {sorted(active)}") from None

    def faces_of_dim(self, d):
        return tuple(F for F in self.faces if F.dim == d)

    def faces_containing_vertex(self, vid):
        return tuple(F for F in self.faces if vid in F.vertex_ids)

    def facet_face(self, i) -> Face:
        return self.face({i})

    @cached_property
    def _children(self):
        kids = {F.active: [] for F in self.faces}
        for F in self.faces:
            for G in self.faces:
                if G.dim == F.dim - 1 and F.active < G.active:
                    kids[F.active].append(G)
        return kids

    def triangulation(self, face=None):
        """Pulling triangulation of a face as tuples of vertex ids."""
        face = self.faces[0] if face is None else face
        return self._triangulate(face.active)

    def _triangulate(self, active):
        cache = self.__dict__.setdefault("_tri_cache", {})
        if active in cache:
            return cache[active]
        F = self.face(active)
        if F.dim == 0:
            out = ((F.vertex_ids[0],),)
        else:
            apex = F.vertex_ids[0]
            out = tuple((apex,) + s for G in self._children[active]
                        if apex not in G.vertex_ids for s in self._triangulate(G.active))
        cache[active] = out
        return out

    # -- properties ------------------------------------------------------

    def is_simple(self):
        return all(len(a) == self.dim for a in self.vertex_active)

    def is_delzant(self):
        if not self.is_simple():
            return False
        for a in self.vertex_active:
            if abs(det([self.facets[i].u for i in sorted(a)])) != 1:
                return False
        return True

    def __repr__(self):
        verts = ", ".join("(" + ",".join(str(x) for x in v) + ")" for v in self.vertices)
        return f"LatticePolytope(dim={self.dim}, vertices=[{verts}])"

    # -- derived regions --------------------------------------------------

    def with_offsets(self, offsets):
        """Same normals with new offsets, keeping the combinatorial type."""
        facets = tuple(Facet(f.u, Fraction(c)) for f, c in zip(self.facets, offsets))
        if all(c == 0 for c in offsets):
            origin = tuple(Fraction(0) for _ in range(self.dim))
            return LatticePolytope(facets, [origin], [frozenset(range(len(facets)))],
                                   degenerate=True)
        verts = []
        for active in self.vertex_active:
            rows = _independent_rows(facets, active, self.dim)
            v = solve([facets[i].u for i in rows], [-facets[i].c for i in rows])
            now = frozenset(i for i, f in enumerate(facets) if f.value(v) == 0)
            if now != active or any(f.value(v) < 0 for f in facets):
                raise TypeChangeError(
                    "dilation changes the combinatorial type; shrink h "
                    "(try a factor of 1/2)")
            verts.append(v)
        out = LatticePolytope(facets, verts, self.vertex_active)
        # the face lattice is unchanged; reuse the span lattices
        out.__dict__["faces"] = tuple(
            Face(F.active, F.dim, F.vertex_ids, tuple(verts[i] for i in F.vertex_ids), F.lattice)
            for F in self.faces)
        out.__dict__["_children"] = {
            a: [out._face_index[G.active] for G in kids] for a, kids in self._children.items()}
        if "_tri_cache" in self.__dict__:
            out.__dict__["_tri_cache"] = dict(self.__dict__["_tri_cache"])
        return out

    def scaled(self, k: int):
        """The dilate kP for an integer k >= 0."""
        return self.with_offsets([k * f.c for f in self.facets])


def _independent_rows(facets, active, n):
    chosen = []
    for i in sorted(active):
        if rank([facets[j].u for j in chosen + [i]]) > len(chosen):
            chosen.append(i)
        if len(chosen) == n:
            break
    return chosen


def _check_desk_scale(n, r):
    if n > MAX_DIM:
        raise ResourceLimitError(f"dimension {n} exceeds the desk-scale limit {MAX_DIM}")
    if r > MAX_FACETS:
        raise ResourceLimitError(f"{r} facets exceed the desk-scale limit {MAX_FACETS}")


def _is_bounded(normals, n):
    if rank(normals) < n:
        return False
    # the recession cone {d : U d >= 0} is pointed; look for an extreme ray
    for subset in itertools.combinations(range(len(normals)), n - 1):
        ns = nullspace([normals[i] for i in subset], n)
        if len(ns) != 1:
            continue
        d = ns[0]
        for s in (1, -1):
            if all(s * dot(u, d) >= 0 for u in normals):
                return False
    return True


def from_halfspaces(rep) -> LatticePolytope:
    """Build a polytope from facets given as ``(u, c)`` pairs or Facet objects."""
    facets = []
    for item in rep:
        u, c = (item.u, item.c) if isinstance(item, Facet) else item
        f = _facet_from_halfspace(u, c)
        if f not in facets:
            facets.append(f)
    if not facets:
        raise UnboundedError("no halfspaces given")
    n = len(facets[0].u)
    _check_desk_scale(n, len(facets))
    normals = [f.u for f in facets]
    if not _is_bounded(normals, n):
        raise UnboundedError("the halfspaces define an unbounded region")
    vertices = {}
    for subset in itertools.combinations(range(len(facets)), n):
        A = [facets[i].u for i in subset]
        if det(A) == 0:
            continue
        v = solve(A, [-facets[i].c for i in subset])
        if v in vertices:
            continue
        if all(f.value(v) >= 0 for f in facets):
            vertices[v] = frozenset(i for i, f in enumerate(facets) if f.value(v) == 0)
    if not vertices:
        raise EmptyRegionError("the halfspaces define an empty region")
    verts = sorted(vertices)
    active = [vertices[v] for v in verts]
    common = frozenset.intersection(*active)
    if common:
        raise NotFullDimensionalError(
            f"facets {sorted(common)} are tight on the whole region; it is not full-dimensional")
    P = LatticePolytope(facets, verts, active)
    for i in range(len(facets)):
        on = [a for a in active if i in a]
        if not on or P._make_face(frozenset({i})).dim != n - 1:
            raise GeometryError(f"inequality {i} is redundant (it does not define a facet)")
    return P


def from_vertices(vs) -> LatticePolytope:
    """Convex hull of integer points, as a full-dimensional polytope."""
    pts = sorted({tuple(int(x) for x in v) for v in vs})
    if not pts:
        raise EmptyRegionError("no points given")
    if len(pts) > MAX_VERTICES:
        raise ResourceLimitError(f"{len(pts)} points exceed the desk-scale limit {MAX_VERTICES}")
    n = len(pts[0])
    _check_desk_scale(n, 0)
    diffs = [tuple(a - b for a, b in zip(p, pts[0])) for p in pts[1:]]
    if rank(diffs) < n:
        raise NotFullDimensionalError("the points span a lower-dimensional affine subspace")
    facets = set()
    for subset in itertools.combinations(range(len(pts)), n):
        base = pts[subset[0]]
        rows = [tuple(a - b for a, b in zip(pts[i], base)) for i in subset[1:]]
        ns = nullspace(rows, n)
        if len(ns) != 1:
            continue
        u = integral_multiple(ns[0])
        vals = [dot(u, p) - dot(u, base) for p in pts]
        if all(v >= 0 for v in vals):
            facets.add((u, -dot(u, base)))
        elif all(v <= 0 for v in vals):
            u = tuple(-x for x in u)
            facets.add((u, -dot(u, base)))
    # coordinate-like normals first: x >= 0, y >= 0, ... then the rest
    return from_halfspaces(sorted(facets, reverse=True))


def dilate(P: LatticePolytope, h) -> LatticePolytope:
    """P(h): offsets c_i + h_i, same normals; raises if the type changes."""
    h = [Fraction(x) for x in h]
    if len(h) != P.num_facets:
        raise GeometryError("dilation vector length differs from the facet count")
    if all(x == 0 for x in h):
        return P
    return P.with_offsets([f.c + x for f, x in zip(P.facets, h)])


def dilate_y(P: LatticePolytope, y, h=None) -> LatticePolytope:
    """P_y(h): offsets (1+y) c_i + h_i."""
    y = Fraction(y)
    h = [Fraction(0)] * P.num_facets if h is None else [Fraction(x) for x in h]
    if len(h) != P.num_facets:
        raise GeometryError("dilation vector length differs from the facet count")
    if y == 0 and all(x == 0 for x in h):
        return P
    return P.with_offsets([(1 + y) * f.c + x for f, x in zip(P.facets, h)])


# ---------------------------------------------------------------------------
# volumes and integrals


def _as_poly(x, nh):
    return x if isinstance(x, Polynomial) else Polynomial.constant(nh, x)


def _simplex_integral(points, lattice, f: Polynomial, nh: int):
    """Integral of f over the simplex conv(points), in span-lattice measure.

    Point coordinates may be Fractions or Polynomials in ``nh`` parameters;
    the result is a Polynomial in those parameters.
    """
    d = len(points) - 1
    p0 = [_as_poly(x, nh) for x in points[0]]
    edges = [[_as_poly(x, nh) - y for x, y in zip(p, p0)] for p in points[1:]]
    if d:
        D = det([list(lattice.full_coords(e)[:d]) for e in edges])
        D = _as_poly(D, nh)
        sign = 1 if D.constant_term() > 0 else -1
        if D.constant_term() == 0:
            raise GeometryError("degenerate simplex in triangulation")
        D = D * sign
    else:
        D = Polynomial.constant(nh, Fraction(1))
    total = nh + d
    hpos = list(range(nh))
    subs = []
    for j in range(len(p0)):
        x = p0[j].embed(total, hpos)
        for i, e in enumerate(edges):
            if e[j]:
                x = x + e[j].embed(total, hpos) * Polynomial.variable(total, nh + i)
        subs.append(x)
    g = f.compose(subs) if f.nvars else Polynomial.constant(total, f.constant_term())
    out = {}
    for exps, c in g.items():
        et = exps[nh:]
        w = Fraction(math.prod(math.factorial(a) for a in et), math.factorial(d + sum(et)))
        key = exps[:nh]
        out[key] = out.get(key, 0) + c * w
    return Polynomial(nh, out) * D


def integrate_polynomial(region, f: Polynomial, face: Face | None = None):
    """Exact integral of f over a polytope or one of its faces.

    Faces are measured in their span lattice, so a lattice segment of
    length one has measure 1 and a vertex integrates f to f(v).
    """
    P = region
    F = P.faces[0] if face is None else face
    if P.degenerate:
        return f.evaluate(P.vertices[0])
    total = Fraction(0)
    for simplex in P._triangulate(F.active):
        pts = [P.vertices[i] for i in simplex]
        total += _simplex_integral(pts, F.lattice, f, 0).constant_term()
    return total


def volume(region, face: Face | None = None) -> Fraction:
    P = region
    F = P.faces[0] if face is None else face
    if F.dim == 0 or P.degenerate:
        return Fraction(1)
    total = Fraction(0)
    for simplex in P._triangulate(F.active):
        pts = [P.vertices[i] for i in simplex]
        edges = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
        total += abs(det([list(F.lattice.full_coords(e)[:F.dim]) for e in edges]))
    return total / math.factorial(F.dim)


def vertex_polynomials(P: LatticePolytope, *, with_y=False):
    """Vertices of P(h) (or P_y(h)) as affine Polynomials in h (and y last)."""
    if not P.is_simple():
        raise NotSimpleError("dilation polynomials need a simple polytope")
    r = P.num_facets
    nv = r + (1 if with_y else 0)
    out = []
    for active in P.vertex_active:
        rows = sorted(active)
        Ainv = inverse([P.facets[i].u for i in rows])
        coords = []
        for j in range(P.dim):
            poly = Polynomial.constant(nv, 0)
            for k, i in enumerate(rows):
                a = -Ainv[j][k]
                if a == 0:
                    continue
                c = P.facets[i].c
                lin = [0] * nv
                lin[i] = a
                if with_y:
                    lin[r] = a * c
                poly = poly + Polynomial.linear(nv, lin, a * c)
            coords.append(poly)
        out.append(tuple(coords))
    return out


def integral_polynomial(P: LatticePolytope, f: Polynomial, face: Face | None = None,
                        *, with_y=False) -> Polynomial:
    """The integral of f over the face of P(h) (or P_y(h)) as a polynomial.

    Variables are h_1..h_r (and y last when ``with_y``).  Exact for all h near
    zero, where the combinatorial type is constant.
    """
    F = P.faces[0] if face is None else face
    verts = vertex_polynomials(P, with_y=with_y)
    nv = P.num_facets + (1 if with_y else 0)
    total = Polynomial.constant(nv, 0)
    for simplex in P._triangulate(F.active):
        total = total + _simplex_integral([verts[i] for i in simplex], F.lattice, f, nv)
    return total
