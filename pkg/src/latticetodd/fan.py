"""Rational cones, normal fans, finite group data, subdivisions and fibrations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .arith import (
    SpanLattice,
    det,
    dot,
    integral_multiple,
    inverse,
    nullspace,
    rank,
    snf,
    solve,
)
from .errors import GeometryError, NotFullDimensionalError, ResourceLimitError
from .polytope import LatticePolytope

MAX_PIECES = 20000


def _frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


class Cone:
    """Cone(generators) in M (``side="M"``) or N (``side="N"``).

    Generators are made primitive and reduced to the extreme rays, kept in
    input order.
    """

    def __init__(self, generators, side="N", ambient_dim=None, *, reduce=True):
        gens = []
        for g in generators:
            p = integral_multiple(g) if any(g) else None
            if p is not None and p not in gens:
                gens.append(p)
        if ambient_dim is None:
            if not gens:
                raise GeometryError("ambient dimension needed for the zero cone")
            ambient_dim = len(gens[0])
        self.side = side
        self.ambient_dim = ambient_dim
        self.span = SpanLattice(gens, ambient_dim)
        self.dim = self.span.rank
        self.generators = tuple(gens)
        if reduce and len(gens) > self.dim:
            self.generators = tuple(g for i, g in enumerate(gens) if self._is_extreme(i))

    def __repr__(self):
        return f"Cone({list(self.generators)}, side={self.side!r})"

    def __eq__(self, other):
        return (isinstance(other, Cone) and self.side == other.side
                and set(self.generators) == set(other.generators))

    def __hash__(self):
        return hash((self.side, frozenset(self.generators)))

    # -- facet description -------------------------------------------------

    def coords(self, x):
        return self.span.coords(x)

    @cached_property
    def _facets(self):
        """List of (functional on span coordinates, generator indices on it)."""
        k = self.dim
        if k == 0:
            return ()
        pts = [self.span.coords(g) for g in self.generators]
        found = {}
        for subset in itertools.combinations(range(len(pts)), k - 1):
            rows = [pts[i] for i in subset]
            if rows and rank(rows) != k - 1:
                continue
            ns = nullspace(rows, k)
            if len(ns) != 1:
                continue
            phi = integral_multiple(ns[0])
            vals = [dot(phi, p) for p in pts]
            if all(v >= 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals):
                phi = tuple(-x for x in phi)
                vals = [-v for v in vals]
            else:
                continue
            if all(v == 0 for v in vals):
                continue
            on = frozenset(i for i, v in enumerate(vals) if v == 0)
            found[phi] = on
        return tuple(sorted(found.items(), key=lambda kv: sorted(kv[1])))

    def _is_extreme(self, i):
        if self.dim == 1:
            return True
        on = [phi for phi, idx in self._facets if i in idx]
        return bool(on) and rank(on) == self.dim - 1

    @property
    def pointed(self):
        if self.dim == 0:
            return True
        return rank([phi for phi, _ in self._facets]) == self.dim if self._facets else False

    @property
    def simplicial(self):
        return len(self.generators) == self.dim

    @cached_property
    def facet_functionals(self):
        """Ambient primitive vectors w with <w, x> >= 0 on the cone, one per facet."""
        return tuple(integral_multiple(self.span.ambient_functional(phi)) if any(phi) else phi
                     for phi, _ in self._facets)

    def contains(self, x, *, relint=False):
        x = tuple(Fraction(a) for a in x)
        if self.dim == 0:
            return not any(x)
        try:
            c = self.span.coords(x)
        except ValueError:
            return False
        for phi, _ in self._facets:
            v = dot(phi, c)
            if v < 0 or (relint and v == 0):
                return False
        return True

    def lambdas(self, x):
        """Coordinates of x in the generator basis (simplicial cones)."""
        self._require_simplicial()
        if self.dim == 0:
            return ()
        A = [self.span.coords(g) for g in self.generators]
        return solve(list(zip(*A)), list(self.span.coords(x)))

    def _require_simplicial(self):
        if not self.simplicial:
            raise GeometryError(f"{self!r} is not simplicial")

    # -- faces -------------------------------------------------------------

    @cached_property
    def face_index_sets(self):
        """Generator index sets of all faces, from the apex up to the cone itself."""
        full = frozenset(range(len(self.generators)))
        if self.simplicial:
            sets = {frozenset(s) for r in range(len(full) + 1)
                    for s in itertools.combinations(sorted(full), r)}
        else:
            sets = {full} | {on for _, on in self._facets}
            frontier = set(sets)
            while frontier:
                new = {a & b for a in frontier for b in sets} - sets
                sets |= new
                frontier = new
            sets.add(frozenset())
        return tuple(sorted(sets, key=lambda s: (len(s), sorted(s))))

    def face(self, index_set) -> Cone:
        return Cone([self.generators[i] for i in sorted(index_set)], self.side,
                    self.ambient_dim, reduce=False)

    def faces(self):
        return tuple(self.face(s) for s in self.face_index_sets)

    def dual(self) -> Cone:
        if self.dim != self.ambient_dim or not self.pointed:
            raise GeometryError("the dual of a cone is pointed only for full-dimensional cones")
        return Cone(self.facet_functionals, "M" if self.side == "N" else "N", self.ambient_dim)


# ---------------------------------------------------------------------------
# multiplicity and the group N_sigma / (u_1, ..., u_k)


def multiplicity(sigma: Cone) -> int:
    sigma._require_simplicial()
    if sigma.dim == 0:
        return 1
    return math.prod(d for d in _snf_diag([sigma.coords(g) for g in sigma.generators]) if d)


def _snf_diag(rows):
    D, _, _ = snf([[int(x) for x in r] for r in rows])
    return [D[i][i] for i in range(min(len(D), len(D[0])))]


@dataclass(frozen=True)
class GroupElement:
    """A coset n + (u_1, ..., u_k) with its rotation numbers gamma_i in [0, 1)."""

    representative: tuple
    gamma: tuple

    @property
    def is_identity(self):
        return not any(self.gamma)


def lattice_group(generator_coords):
    """Elements of Z^k / (rows) for a nonsingular integer k x k matrix.

    ``generator_coords`` may be non-primitive.  Each element carries the
    coordinates of x in the row basis, reduced mod 1.
    """
    A = [[int(x) for x in r] for r in generator_coords]
    k = len(A)
    if k == 0:
        return (GroupElement((), ()),)
    if det(A) == 0:
        raise GeometryError("generators are linearly dependent")
    D, _, V = snf(A)
    diag = [D[i][i] for i in range(k)]
    Vinv = inverse(V)
    At = [list(col) for col in zip(*A)]
    out = []
    for y in itertools.product(*(range(d) for d in diag)):
        x = tuple(sum(y[i] * Vinv[i][j] for i in range(k)) for j in range(k))
        lam = solve(At, list(x))
        out.append(GroupElement(tuple(int(a) for a in x),
                                tuple(_frac_part(Fraction(a)) for a in lam)))
    out.sort(key=lambda g: (any(g.gamma), g.gamma))
    return tuple(out)


def group_data(sigma: Cone):
    """All elements of G_sigma; representatives are ambient vectors in N_sigma."""
    sigma._require_simplicial()
    elems = lattice_group([sigma.coords(g) for g in sigma.generators])
    return tuple(GroupElement(sigma.span.lift(g.representative), g.gamma) for g in elems)


def group_data_open(sigma: Cone):
    """G°_sigma: elements with every rotation number nonzero."""
    return tuple(g for g in group_data(sigma) if all(g.gamma))


# ---------------------------------------------------------------------------
# subdivisions


def _pulling_triangulation(sigma: Cone):
    """Simplicial cones covering sigma, pulled from its first generator."""
    def rec(idx):
        face = sigma.face(idx)
        if face.simplicial:
            return [tuple(sorted(idx))]
        apex = min(idx)
        out = []
        for _, on in face._facets:
            sub = frozenset(sorted(idx)[i] for i in on)
            if apex not in sub:
                out.extend(tuple(sorted((apex,) + s)) for s in rec(sub))
        return out

    full = frozenset(range(len(sigma.generators)))
    return [tuple(sigma.generators[i] for i in s) for s in rec(full)]


def unimodular_subdivide(sigma: Cone, max_pieces: int = MAX_PIECES):
    """Unimodular cones (as generator tuples) subdividing a pointed cone."""
    if not sigma.pointed:
        raise GeometryError(f"{sigma!r} is not pointed")
    if sigma.dim == 0:
        return [()]
    span = sigma.span
    todo = [tuple(span.coords(g) for g in s) for s in _pulling_triangulation(sigma)]
    done = []
    while todo:
        gens = todo.pop()
        m = abs(det(gens))
        if m == 1:
            done.append(tuple(span.lift(g) for g in gens))
            if len(done) > max_pieces:
                raise ResourceLimitError(f"unimodular subdivision exceeds {max_pieces} pieces")
            continue
        best = min((g for g in lattice_group(gens) if g.gamma and any(g.gamma)),
                   key=lambda g: (sum(g.gamma), g.gamma))
        p = tuple(sum((c * v[j] for c, v in zip(best.gamma, gens)), Fraction(0))
                  for j in range(len(gens)))
        p = tuple(int(x) for x in p)
        # push in reverse so pieces come out in generator order
        for i in reversed(range(len(gens))):
            if best.gamma[i]:
                todo.append(gens[:i] + (p,) + gens[i + 1:])
        if len(todo) + len(done) > max_pieces:
            raise ResourceLimitError(f"unimodular subdivision exceeds {max_pieces} pieces")
    return done


@dataclass(frozen=True)
class HalfOpenPiece:
    """Unimodular cone with the facets opposite to generators in K removed."""

    generators: tuple
    removed: frozenset
    apex: tuple

    def shift(self):
        """apex + sum of the generators whose opposite facet is removed."""
        out = list(self.apex)
        for i in self.removed:
            out = [a + b for a, b in zip(out, self.generators[i])]
        return tuple(out)


def _reference_vectors(sigma, span):
    """Generator sum, then perturbations by g_1/q; then a moment-curve perturbation.

    The second family is needed when the first generator lies on a wall of a
    triangulated non-simplicial cone.
    """
    coords = [span.coords(g) for g in sigma.generators]
    base = [sum(c) for c in zip(*coords)]
    yield base
    for q in range(1, 65):
        yield [b + Fraction(1, q) * f for b, f in zip(base, coords[0])]
    for q in range(2, 200):
        yield [b + sum(Fraction(1, q ** (j + 1)) * g[i] for j, g in enumerate(coords))
               for i, b in enumerate(base)]


def half_open_cover(sigma: Cone, subdivision=None, apex=None):
    """Partition sigma into half-open unimodular pieces."""
    if subdivision is None:
        subdivision = unimodular_subdivide(sigma)
    apex = tuple(Fraction(0) for _ in range(sigma.ambient_dim)) if apex is None else tuple(apex)
    if sigma.dim == 0:
        return [HalfOpenPiece((), frozenset(), apex)]
    span = sigma.span
    mats = [[span.coords(g) for g in gens] for gens in subdivision]
    for ref in _reference_vectors(sigma, span):
        lams = [solve([list(c) for c in zip(*M)], ref) for M in mats]
        if all(all(x != 0 for x in lam) for lam in lams):
            break
    else:
        raise GeometryError("no generic reference vector found")
    return [HalfOpenPiece(tuple(gens), frozenset(i for i, x in enumerate(lam) if x < 0), apex)
            for gens, lam in zip(subdivision, lams)]


# ---------------------------------------------------------------------------
# normal fan, tangent cones, star fans


class NormalFan:
    """Inner normal fan of a full-dimensional polytope.

    ``rays[i]`` is the normal of facet i; ``cones`` maps the active facet set
    of each face to its cone.
    """

    def __init__(self, P: LatticePolytope):
        if not P.full_dimensional:
            raise NotFullDimensionalError("normal fans need a full-dimensional polytope")
        self.polytope = P
        self.dim = P.dim
        self.rays = P.normals
        self.cones = {F.active: Cone([self.rays[i] for i in sorted(F.active)], "N", P.dim,
                                     reduce=False)
                      for F in P.faces}

    def cone(self, active) -> Cone:
        return self.cones[frozenset(active)]

    def ray_indices(self, active):
        return tuple(sorted(active))

    def maximal_cones(self):
        return {a: self.cones[a] for a in self.polytope.vertex_active}

    def singular_cones(self):
        return {a: c for a, c in self.cones.items() if c.simplicial and multiplicity(c) > 1}


def normal_fan(P: LatticePolytope) -> NormalFan:
    return NormalFan(P)


def tangent_cone(P: LatticePolytope, v) -> Cone:
    """Cone(P - v) at a vertex, generated by primitive edge directions."""
    vid = P.vertex_index(v)
    vert = P.vertices[vid]
    active = P.vertex_active[vid]
    edges = []
    for F in P.faces_of_dim(1):
        if vid in F.vertex_ids:
            other = next(P.vertices[i] for i in F.vertex_ids if i != vid)
            d = integral_multiple(tuple(a - b for a, b in zip(other, vert)))
            # at a simple vertex, edge i is the one leaving the i-th active facet
            left = min(active - F.active)
            edges.append((left if len(active) == P.dim else 0, d))
    edges.sort()
    dirs = [d for _, d in edges]
    C = Cone(dirs, "M", P.dim, reduce=False)
    expected = {P.facets[i].u for i in P.vertex_active[vid]}
    if set(C.facet_functionals) != expected:
        raise GeometryError("tangent cone is not dual to the vertex cone of the normal fan")
    return C


class StarFan:
    """Images of the cones containing sigma_E in N / N_sigma.

    ``rays`` maps facet index -> image vector (possibly non-primitive);
    ``cones`` maps the active set of each face F of E to the tuple of facet
    indices of its cone that are not in sigma_E.
    """

    def __init__(self, fan: NormalFan, active):
        active = frozenset(active)
        self.fan = fan
        self.active = active
        sigma = fan.cone(active)
        lat = SpanLattice([fan.rays[i] for i in sorted(active)], fan.dim)
        self.dim = fan.dim - lat.rank
        self.lattice = lat
        self.cones = {}
        rays = {}
        for a in fan.cones:
            if a >= active:
                extra = tuple(sorted(a - active))
                self.cones[a] = extra
                for i in extra:
                    rays[i] = tuple(int(x) for x in lat.quotient(fan.rays[i]))
        self.rays = dict(sorted(rays.items()))
        self.sigma = sigma

    def cone_group(self, a):
        """Group elements of the image cone of face a, using raw image generators."""
        extra = self.cones[a]
        gens = [self.rays[i] for i in extra]
        if len(gens) != self.dim:
            sub = SpanLattice(gens, self.dim)
            gens = [sub.coords(g) for g in gens]
        return lattice_group(gens)


def star_fan(fan: NormalFan, active) -> StarFan:
    return StarFan(fan, active)


# ---------------------------------------------------------------------------
# nef divisors and toric fibrations


@dataclass(frozen=True)
class FibrationFace:
    active: frozenset
    dim: int
    vertices: tuple


@dataclass(frozen=True)
class FibrationData:
    """P_{D'} as vertices and faces, and the multiplicities d_l(X/E')."""

    divisor: tuple
    vertices: tuple
    faces: tuple
    cone_map: dict
    multiplicities: dict

    def d(self, face_active, ell):
        return self.multiplicities.get((frozenset(face_active), ell), 0)

    def alternating_sum(self, face_active):
        return sum((-1) ** ell * c for (a, ell), c in self.multiplicities.items()
                   if a == frozenset(face_active))


def fibration_multiplicities(P: LatticePolytope, divisor) -> FibrationData:
    fan = NormalFan(P)
    d = tuple(Fraction(x) for x in divisor)
    if len(d) != P.num_facets:
        raise GeometryError("divisor needs one coefficient per facet")
    n = P.dim
    rays = fan.rays
    msig = {}
    for a in P.vertex_active:
        idx = sorted(a)
        basis = []
        for i in idx:
            if rank([rays[j] for j in basis + [i]]) > len(basis):
                basis.append(i)
        m = solve([rays[i] for i in basis], [-d[i] for i in basis])
        bad = [i for i in idx if dot(rays[i], m) != -d[i]]
        if bad or any(x.denominator != 1 for x in m):
            raise GeometryError(f"divisor is not Cartier on the cone with rays {idx}")
        worse = [i for i in range(len(rays)) if dot(rays[i], m) < -d[i]]
        if worse:
            raise GeometryError(
                f"divisor is not globally generated: cone with rays {idx} fails on rays {worse}")
        msig[a] = m
    verts = tuple(sorted(set(msig.values())))

    def tight(m):
        return frozenset(i for i in range(len(rays)) if dot(rays[i], m) + d[i] == 0)

    def make_face(points):
        act = frozenset.intersection(*(tight(p) for p in points))
        diffs = [tuple(x - y for x, y in zip(p, points[0])) for p in points[1:]]
        return FibrationFace(act, rank(diffs) if diffs else 0, tuple(sorted(points)))

    faces = {}
    cone_map = {}
    mult = {}
    for a, sigma in fan.cones.items():
        u = tuple(sum(c) for c in zip(*[rays[i] for i in a])) if a else (0,) * n
        vals = [dot(u, m) for m in verts]
        low = min(vals)
        E = make_face([m for m, v in zip(verts, vals) if v == low])
        faces[E.active] = E
        ell = (n - sigma.dim) - E.dim
        cone_map[a] = (E.active, ell)
        mult[(E.active, ell)] = mult.get((E.active, ell), 0) + 1
    ordered = tuple(sorted(faces.values(), key=lambda F: (-F.dim, sorted(F.active))))
    return FibrationData(tuple(d), verts, ordered, cone_map,
                         dict(sorted(mult.items(), key=lambda kv: (sorted(kv[0][0]), kv[0][1]))))
