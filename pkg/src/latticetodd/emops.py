"""Euler-Maclaurin operators in the facet dilation parameters and their checks.

An operator is a power series p(x_1, ..., x_r), one variable per facet;
applied to a polynomial Q(h) it gives sum_alpha p_alpha * (d/dh)^alpha Q(0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import oracle
from .arith import (
    Polynomial,
    YPolynomial,
    dot,
    exp_coefficients,
    interpolate_simplex_grid,
    inverse,
    monomials_up_to,
    root_of_unity,
    series_inverse,
    series_mul,
    solve,
    todd_coefficients,
)
from .brion import (
    cone_exp_sum,
    evaluate_at,
    facets_removed_cone_sum,
    relint_exp_sum,
    vertex_cone,
    weighted_vertex_sum,
)
from .errors import (
    ConvergenceError,
    GeometryError,
    NotSimpleError,
    SchemaError,
    TruncationError,
    TypeChangeError,
)
from .fan import (
    Cone,
    fibration_multiplicities,
    group_data,
    group_data_open,
    multiplicity,
    normal_fan,
    star_fan,
)
from .polytope import (
    Face,
    LatticePolytope,
    dilate,
    dilate_y,
    integral_polynomial,
    integrate_polynomial,
)

EXACT = "exact"
EXACT_Y = "exact-y"
COMPLEX = "complex"
DEFAULT_TOL = 1e-8


# ---------------------------------------------------------------------------
# univariate factors


@lru_cache(maxsize=None)
def _inv_one_minus(gamma: Fraction, order: int):
    """Coefficients of 1/(1 - a e^{-x}), a = e^{2 pi i gamma} != 1."""
    a = root_of_unity(gamma)
    base = [-a * c for c in exp_coefficients(-1.0, order)]
    base[0] += 1
    return tuple(series_inverse(base, order))


@lru_cache(maxsize=None)
def _g(gamma: Fraction, order: int):
    """x / (1 - a e^{-x}); the Todd series when a = 1."""
    if not gamma:
        return todd_coefficients(order)
    inv = _inv_one_minus(gamma, order)
    return (0j,) + inv[:order]


def _minus_x(series):
    return tuple(c - (1 if k == 1 else 0) for k, c in enumerate(series))


def _x_series(order):
    return tuple(Fraction(int(k == 1)) for k in range(order + 1))


def _one_series(order):
    return tuple(Fraction(int(k == 0)) for k in range(order + 1))


def univariate_factor(kind: str, gamma=Fraction(0), order: int = 4, shift=0):
    """Coefficient tuple of one per-facet factor.

    kinds: todd, dual, weighted, weighted_removed, inverse, x, one, minkowski.
    """
    gamma = Fraction(gamma) % 1
    if kind == "todd":
        return _g(gamma, order)
    if kind == "dual":
        return _minus_x(_g(gamma, order))
    if kind == "weighted":
        g = _g(gamma, order)
        return tuple(YPolynomial((c, c - (1 if k == 1 else 0))) for k, c in enumerate(g))
    if kind == "weighted_removed":
        g = _minus_x(_g(gamma, order))
        return tuple(YPolynomial((c, c)) for c in g)
    if kind == "inverse":
        return _inv_one_minus(gamma, order) if gamma else None
    if kind == "x":
        return _x_series(order)
    if kind == "one":
        return _one_series(order)
    if kind == "minkowski":
        return series_mul(exp_coefficients(Fraction(shift), order), _g(gamma, order), order)
    raise SchemaError(f"unknown factor kind {kind!r}")


def _hat(series):
    """x -> (1+y) x: multiply the k-th coefficient by (1+y)^k."""
    return tuple(YPolynomial.lift(c) * YPolynomial.one_plus_y_power(k)
                 for k, c in enumerate(series))


# ---------------------------------------------------------------------------
# operator series


def _num(c, y):
    return c(y) if isinstance(c, YPolynomial) else c


@dataclass
class OperatorSeries:
    """Sum over terms of weight * prod_rho factor_rho(x_rho), truncated at ``order``.

    The whole series is multiplied by (1+y)^scale_power; a negative power
    means exact division of the applied value.
    """

    nvars: int
    order: int
    terms: list
    field: str = EXACT
    scale_power: int = 0
    label: str = ""

    def coefficient(self, alpha):
        if sum(alpha) > self.order:
            raise TruncationError(f"monomial {alpha} lies beyond the truncation order {self.order}")
        total = 0
        for w, factors in self.terms:
            c = w
            for f, e in zip(factors, alpha):
                c = c * f[e]
                if c == 0:
                    break
            else:
                total = total + c
        return total

    def expand(self, degree=None):
        degree = self.order if degree is None else degree
        out = {}
        for alpha in monomials_up_to(self.nvars, degree):
            c = self.coefficient(alpha)
            if c != 0:
                out[alpha] = c
        return out

    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def evaluate(self, point, y=None):
        """Numeric value at x = point, each factor truncated at ``order``."""
        total = 0j
        for w, factors in self.terms:
            val = complex(_num(w, y))
            for f, x in zip(factors, point):
                s = 0j
                for c in reversed(f):
                    s = s * x + complex(_num(c, y))
                val *= s
            total += val
        if self.scale_power:
            total *= (1 + y) ** self.scale_power
        return total

    def __add__(self, other):
        if (self.nvars, self.scale_power) != (other.nvars, other.scale_power):
            raise ValueError("operators live in different rings")
        field = COMPLEX if COMPLEX in (self.field, other.field) else max(self.field, other.field)
        return OperatorSeries(self.nvars, min(self.order, other.order),
                              self.terms + other.terms, field, self.scale_power, self.label)


def _divide_one_plus_y(p: YPolynomial, k: int, tol: float):
    """Exact (or, for float coefficients, tolerance-checked) division by (1+y)^k."""
    for _ in range(k):
        c = p.coeffs
        if not c:
            return p
        b = [0] * (len(c) - 1)
        acc = 0
        for i in range(len(c) - 1, 0, -1):
            acc = c[i] - acc
            b[i - 1] = acc
        rem = c[0] - acc
        if (tol == 0 and rem != 0) or (tol and abs(rem) > tol * max(1.0, max(abs(x) for x in c))):
            raise ArithmeticError("value is not divisible by (1+y)")
        p = YPolynomial(b)
    return p


def apply(op: OperatorSeries, Q: Polynomial, *, tol=0.0):
    """sum_alpha op_alpha * alpha! * Q_alpha, then the (1+y)^scale_power factor."""
    if Q.nvars != op.nvars:
        raise ValueError("operator and polynomial use different variable sets")
    if Q.degree > op.order:
        raise TruncationError(
            f"operator truncated at order {op.order}; order {Q.degree} is required")
    total = 0
    for alpha, c in Q.items():
        k = op.coefficient(alpha)
        if k == 0:
            continue
        total = total + k * c * math.prod(math.factorial(a) for a in alpha)
    if op.scale_power > 0:
        total = YPolynomial.lift(total) * YPolynomial.one_plus_y_power(op.scale_power)
    elif op.scale_power < 0:
        total = _divide_one_plus_y(YPolynomial.lift(total), -op.scale_power, tol)
    return total


# ---------------------------------------------------------------------------
# group characters


def _require_simple(P):
    if not P.is_simple():
        raise NotSimpleError("Euler-Maclaurin operators need a simple polytope")


def global_characters(P: LatticePolytope):
    """Character tuples over all facets: the identity and G°_sigma of every singular cone."""
    _require_simple(P)
    fan = normal_fan(P)
    r = P.num_facets
    chars = {(Fraction(0),) * r}
    for a, cone in fan.cones.items():
        if not a:
            continue
        rays = sorted(a)
        for g in group_data_open(cone):
            t = [Fraction(0)] * r
            for i, gam in zip(rays, g.gamma):
                t[i] = gam
            chars.add(tuple(t))
    return sorted(chars, key=lambda t: (any(t), t))


def star_characters(P: LatticePolytope, active):
    """Character tuples over all facets for the star fan of sigma_E (raw image generators)."""
    fan = normal_fan(P)
    st = star_fan(fan, active)
    r = P.num_facets
    chars = {(Fraction(0),) * r}
    for a, extra in st.cones.items():
        if not extra:
            continue
        for g in st.cone_group(a):
            if all(g.gamma):
                t = [Fraction(0)] * r
                for i, gam in zip(extra, g.gamma):
                    t[i] = gam
                chars.add(tuple(t))
    return sorted(chars, key=lambda t: (any(t), t)), st


def _resolve_backend(chars, backend):
    trivial = len(chars) == 1
    if backend is None:
        return EXACT if trivial else COMPLEX
    if backend == EXACT and not trivial:
        raise GeometryError(
            "the exact backend needs trivial group characters (a Delzant polytope); "
            "use the complex backend")
    if backend not in (EXACT, COMPLEX):
        raise SchemaError(f"unknown backend {backend!r}")
    return backend


def _product_operator(r, order, chars, factor_of, *, weight=Fraction(1), scale_power=0,
                      label="", backend=EXACT, y_field=False):
    terms = []
    for t in chars:
        factors = tuple(factor_of(rho, t[rho]) for rho in range(r))
        terms.append((weight, factors))
    fld = COMPLEX if backend == COMPLEX else (EXACT_Y if y_field else EXACT)
    return OperatorSeries(r, order, terms, fld, scale_power, label)


# ---------------------------------------------------------------------------
# operators


def todd_operator(P: LatticePolytope, backend=None, order=None) -> OperatorSeries:
    """sum over g in G_Sigma of prod_rho x_rho / (1 - a_rho(g) e^{-x_rho})."""
    chars = global_characters(P)
    backend = _resolve_backend(chars, backend)
    order = P.dim if order is None else order
    return _product_operator(P.num_facets, order, chars,
                             lambda rho, gam: univariate_factor("todd", gam, order),
                             label="todd", backend=backend)


def _face_of(P: LatticePolytope, face) -> Face:
    if isinstance(face, Face):
        return face
    if isinstance(face, int):
        if not 0 <= face < len(P.faces):
            raise SchemaError(f"face index {face} out of range 0..{len(P.faces) - 1}")
        return P.faces[face]
    return P.face(frozenset(face))


def variant_operator(P: LatticePolytope, kind: str, *, K=(), face=None, divisor=None,
                     backend=None, order=None):
    """Operator series for one identity kind (guillemin returns a face-indexed list)."""
    _require_simple(P)
    n, r = P.dim, P.num_facets
    order = n if order is None else order
    K = frozenset(K)
    if kind in ("todd", "embv"):
        return todd_operator(P, backend, order)
    if kind in ("dual", "facets_removed", "weighted", "weighted_hat", "weighted_facets_removed",
                "minkowski"):
        chars = global_characters(P)
        backend = _resolve_backend(chars, backend)
        if kind == "dual":
            K = frozenset(range(r))
        if kind in ("dual", "facets_removed"):
            def fac(rho, gam):
                return univariate_factor("dual" if rho in K else "todd", gam, order)
            return _product_operator(r, order, chars, fac, label=kind, backend=backend)
        if kind == "minkowski":
            if divisor is None or len(divisor) != r:
                raise SchemaError("the minkowski kind needs one divisor coefficient per facet")
            shift = [Fraction(d) - f.c for d, f in zip(divisor, P.facets)]

            def fac(rho, gam):
                return univariate_factor("minkowski", gam, order, shift[rho])
            return _product_operator(r, order, chars, fac, label=kind, backend=backend)
        if kind == "weighted_hat":
            def fac(rho, gam):
                return _hat(univariate_factor("weighted", gam, order))
            return _product_operator(r, order, chars, fac, scale_power=-r, label=kind,
                                     backend=backend, y_field=True)

        def fac(rho, gam):
            k = "weighted_removed" if rho in K else "weighted"
            return univariate_factor(k, gam, order)
        return _product_operator(r, order, chars, fac, scale_power=n - r, label=kind,
                                 backend=backend, y_field=True)
    if kind in ("face_closed", "face_relint", "weighted_face"):
        E = _face_of(P, face)
        return face_operator(P, E, kind, backend, order)
    if kind == "guillemin":
        return guillemin_operators(P, backend, order)
    raise SchemaError(f"unknown operator kind {kind!r}")


def face_operator(P: LatticePolytope, E: Face, kind="face_closed", backend=None, order=None):
    """mult(sigma_E) prod_{rho in sigma_E} x_rho times the star-fan Todd-type series."""
    r = P.num_facets
    order = P.dim if order is None else order
    chars, st = star_characters(P, E.active)
    backend = _resolve_backend(chars, backend)
    sigma = normal_fan(P).cone(E.active)
    mult = multiplicity(sigma)
    star_rays = set(st.rays)
    base = {"face_closed": "todd", "face_relint": "dual", "weighted_face": "weighted"}[kind]

    def fac(rho, gam):
        if rho in E.active:
            return univariate_factor("x", 0, order)
        if rho in star_rays:
            return univariate_factor(base, gam, order)
        return univariate_factor("one", 0, order)
    scale = E.dim - len(star_rays) if kind == "weighted_face" else 0
    return _product_operator(r, order, chars, fac, weight=Fraction(mult), scale_power=scale,
                             label=kind, backend=backend, y_field=kind == "weighted_face")


def guillemin_operators(P: LatticePolytope, backend=None, order=None):
    """[(face, operator)] for faces whose G°_sigma_E is nonempty (E = P included)."""
    _require_simple(P)
    fan = normal_fan(P)
    r = P.num_facets
    order = P.dim if order is None else order
    chars = global_characters(P)
    backend = _resolve_backend(chars, backend)
    out = []
    for E in P.faces:
        sigma = fan.cone(E.active)
        elems = group_data_open(sigma) if E.active else group_data(sigma)
        if not elems:
            continue
        rays = sorted(E.active)
        mult = multiplicity(sigma)
        terms = []
        for g in elems:
            gam = dict(zip(rays, g.gamma))
            factors = tuple(univariate_factor("inverse", gam[rho], order) if rho in gam
                            else univariate_factor("todd", 0, order) for rho in range(r))
            terms.append((Fraction(1, mult), factors))
        fld = COMPLEX if backend == COMPLEX or any(g.gamma and any(g.gamma) for g in elems) else EXACT
        out.append((E, OperatorSeries(r, order, terms, fld, 0, "guillemin")))
    return out


# ---------------------------------------------------------------------------
# dilation polynomials


def _poly_cache(P):
    return P.__dict__.setdefault("_hpoly_cache", {})


def split_y(Q: Polynomial, r: int) -> Polynomial:
    """Polynomial in (h_1..h_r, y) -> polynomial in h with YPolynomial coefficients."""
    acc = {}
    for exps, c in Q.items():
        h, k = exps[:r], exps[r]
        coeffs = acc.setdefault(h, {})
        coeffs[k] = coeffs.get(k, 0) + c
    out = {}
    for h, coeffs in acc.items():
        out[h] = YPolynomial([coeffs.get(k, 0) for k in range(max(coeffs) + 1)])
    return Polynomial(r, out)


def integral_h_polynomial(P: LatticePolytope, f: Polynomial | None = None, *, y=False,
                          face=None, method="symbolic", step=None) -> Polynomial:
    """The integral of f over the face of P(h) (or P_y(h) with ``y``) as a polynomial in h.

    With ``y`` the coefficients are YPolynomials.  ``method="grid"``
    interpolates exact integrals of dilated polytopes on a principal lattice
    of dilation vectors instead of integrating symbolically.
    """
    _require_simple(P)
    f = Polynomial.constant(P.dim, Fraction(1)) if f is None else f
    E = P.faces[0] if face is None else _face_of(P, face)
    key = (f, E.active, bool(y), method)
    cache = _poly_cache(P)
    if key in cache:
        return cache[key]
    r = P.num_facets
    if method == "symbolic":
        Q = integral_polynomial(P, f, E, with_y=bool(y))
    elif method == "grid":
        Q = _grid_integral(P, f, E, bool(y), step)
    else:
        raise SchemaError(f"unknown integration method {method!r}")
    if y:
        Q = split_y(Q, r)
    cache[key] = Q
    return Q


def _grid_integral(P, f, E, with_y, step):
    r = P.num_facets
    nv = r + (1 if with_y else 0)
    degree = E.dim + max(f.degree, 0)

    def sample(point):
        h = point[:r]
        R = dilate_y(P, point[r], h) if with_y else dilate(P, h)
        return integrate_polynomial(R, f, R.face(E.active))

    step = Fraction(1, 4 * max(degree, 1)) if step is None else Fraction(step)
    for _ in range(12):
        try:
            return interpolate_simplex_grid(sample, nv, degree, step)
        except TypeChangeError:
            step /= 2
    raise TypeChangeError(
        f"dilation grid changes the combinatorial type even at step {step}; "
        f"shrink the step by a factor of {Fraction(1, 2)} or more")


# ---------------------------------------------------------------------------
# equivariant reduction of operator monomials


class _Reducer:
    """Rewrite x^alpha as sum_S prod_{rho in S} x_rho * q_S(t), S a cone, squarefree.

    Uses x_rho = -s(m) - sum_{rho' not in S} <m,u_rho'> x_rho' acting on
    integrals of P(h), where <m,u_rho> = 1, <m,u_rho'> = 0 on S minus rho, and
    s(m) = sum m_i t_i stands for the derivative along m.
    """

    def __init__(self, P: LatticePolytope):
        self.P = P
        self.n = P.dim
        self.r = P.num_facets
        self.cones = {frozenset(s) for a in P.vertex_active for s in _subsets(a)}
        self.memo = {}

    def m_vector(self, S, rho):
        rows = sorted(S)
        U = [self.P.facets[i].u for i in rows]
        gram = [[Fraction(dot(a, b)) for b in U] for a in U]
        e = [Fraction(int(i == rho)) for i in rows]
        coef = solve(gram, e)
        return tuple(sum((c * u[j] for c, u in zip(coef, U)), Fraction(0)) for j in range(self.n))

    def reduce(self, alpha):
        if alpha in self.memo:
            return self.memo[alpha]
        S = frozenset(i for i, a in enumerate(alpha) if a)
        if S not in self.cones:
            out = {}
        elif all(a <= 1 for a in alpha):
            out = {S: Polynomial.constant(self.n, Fraction(1))}
        else:
            rho = min(i for i, a in enumerate(alpha) if a >= 2)
            m = self.m_vector(S, rho)
            s_m = Polynomial.linear(self.n, m)
            lower = list(alpha)
            lower[rho] -= 1
            out = {}
            for T, q in self.reduce(tuple(lower)).items():
                _acc(out, T, -(s_m * q))
            for rp in range(self.r):
                if rp in S:
                    continue
                c = dot(m, self.P.facets[rp].u)
                if c == 0:
                    continue
                nxt = list(lower)
                nxt[rp] += 1
                for T, q in self.reduce(tuple(nxt)).items():
                    _acc(out, T, q * (-c))
        self.memo[alpha] = out
        return out


def _acc(d, key, val):
    cur = d.get(key)
    v = val if cur is None else cur + val
    if v.is_zero():
        d.pop(key, None)
    else:
        d[key] = v


def _subsets(a):
    items = sorted(a)
    out = []
    for mask in range(1 << len(items)):
        out.append([items[i] for i in range(len(items)) if mask >> i & 1])
    return out


def reduced_face_operators(P: LatticePolytope, op: OperatorSeries, degree: int):
    """Map face active set -> p_E(t) = q_E(t) / mult(sigma_E), from the reduced operator."""
    red = _Reducer(P)
    fan = normal_fan(P)
    acc = {}
    for alpha, c in op.expand(degree).items():
        for S, q in red.reduce(alpha).items():
            _acc(acc, S, q.map_coefficients(lambda x, c=c: x * c))
    return {S: q / multiplicity(fan.cone(S)) for S, q in acc.items()}


def _apply_t(q: Polynomial, f: Polynomial) -> Polynomial:
    """q(d/dm) f."""
    out = Polynomial.constant(f.nvars, 0)
    for beta, c in q.items():
        g = f
        for i, b in enumerate(beta):
            if b:
                g = g.derivative(i, b)
        out = out + g * c
    return out


def pick_coefficients(P: LatticePolytope, backend=None):
    """r_E with |P cap M| = sum_E r_E vol(E); keyed by face active set."""
    op = todd_operator(P, backend, P.dim)
    reduced = reduced_face_operators(P, op, P.dim)
    return {F.active: _const(reduced.get(F.active)) for F in P.faces}


def _const(q):
    return 0 if q is None else q.constant_term()


# ---------------------------------------------------------------------------
# reports


@dataclass
class EMReport:
    identity: str
    operator_value: object
    lattice_value: object
    residual: object
    backend: str
    tolerance: float | None
    passed: bool
    params: dict = field(default_factory=dict)


def _compare(op_val, lat_val, backend, tol):
    if backend == EXACT:
        res = op_val - lat_val
        if isinstance(res, YPolynomial):
            ok = not res
        else:
            ok = res == 0
        return res, ok, None
    diff = YPolynomial.lift(op_val) - YPolynomial.lift(lat_val)
    scale = max([1.0] + [abs(complex(c)) for c in YPolynomial.lift(lat_val).coeffs])
    res = max([0.0] + [abs(complex(c)) for c in diff.coeffs]) / scale
    return res, res < tol, tol


def _one(P):
    return Polynomial.constant(P.dim, Fraction(1))


def _order_for(P, f, order, face_dim=None):
    need = P.dim + max(f.degree, 0)
    if order is None:
        return need
    if order < need:
        raise TruncationError(f"operator truncated at order {order}; order {need} is required")
    return order


def em_verify(P: LatticePolytope, f: Polynomial | None = None, kind: str = "embv", *,
              K=(), face=None, y=None, divisor=None, m0=None, backend=None, order=None,
              tol=DEFAULT_TOL, method="symbolic") -> EMReport:
    """Check one Euler-Maclaurin identity: operator side against a brute-force lattice side."""
    _require_simple(P)
    f = _one(P) if f is None else f
    kind = kind.replace("-", "_")
    params = {}
    if kind == "stokes":
        return stokes_verify(P, f, m0 if m0 is not None else (1,) + (0,) * (P.dim - 1))
    if kind == "pick":
        return pick_verify(P, backend, tol)
    if kind in ("vertex_spec", "vertex_specialization"):
        return vertex_specialization_check(P, f, backend, tol)
    if kind == "guillemin":
        return guillemin_verify(P, f, backend, order, tol, method)
    if kind == "local":
        raise SchemaError("use local_em_verify for tangent-cone identities")
    order = _order_for(P, f, order)
    op = variant_operator(P, kind, K=K, face=face, divisor=divisor, backend=backend, order=order)
    backend = op.field if op.field == COMPLEX else EXACT
    if kind in ("weighted", "weighted_facets_removed", "weighted_face"):
        Q = integral_h_polynomial(P, f, method=method)
    elif kind == "weighted_hat":
        Q = integral_h_polynomial(P, f, y=True, method=method)
    else:
        Q = integral_h_polynomial(P, f, method=method)
    if kind == "weighted_hat" and Q.degree > op.order:
        op = variant_operator(P, kind, backend=backend, order=Q.degree)
    div_tol = 0.0 if backend == EXACT else 1e-9
    op_val = apply(op, Q, tol=div_tol)
    if kind in ("embv", "todd"):
        lat = oracle.lattice_sum(P, f)
    elif kind == "dual":
        lat = oracle.lattice_sum(P, f, strict=range(P.num_facets))
    elif kind == "facets_removed":
        params["K"] = sorted(K)
        lat = oracle.lattice_sum(P, f, strict=K)
    elif kind in ("face_closed", "face_relint", "weighted_face"):
        E = _face_of(P, face)
        params["face"] = sorted(E.active)
        if kind == "face_closed":
            lat = oracle.closed_face_sum(P, E.active, f)
        elif kind == "face_relint":
            lat = oracle.relint_face_sum(P, E.active, f)
        else:
            lat = _weighted_closed_face_sum(P, E.active, f)
    elif kind == "weighted":
        lat = oracle.weighted_face_sum(P, f)
    elif kind == "weighted_facets_removed":
        params["K"] = sorted(K)
        lat = oracle.facets_removed_weighted_sum(P, K, f)
    elif kind == "weighted_hat":
        lat = YPolynomial()
        for d, fd in f.homogeneous_parts().items():
            lat = lat + oracle.weighted_face_sum(P, fd) * YPolynomial.one_plus_y_power(d)
    elif kind == "minkowski":
        params["divisor"] = [str(d) for d in divisor]
        data = fibration_multiplicities(P, divisor)
        region = ([(fc.u, Fraction(d)) for fc, d in zip(P.facets, divisor)], data.vertices)
        lat = oracle.lattice_sum(region, f)
    else:
        raise SchemaError(f"unknown identity kind {kind!r}")
    if y is not None and isinstance(op_val, YPolynomial):
        params["y"] = str(y)
        yv = Fraction(y)
        op_val = op_val(yv)
        lat = lat(yv) if isinstance(lat, YPolynomial) else lat
    res, ok, used_tol = _compare(op_val, lat, backend, tol)
    return EMReport(kind, op_val, lat, res, backend, used_tol, ok, params)


def _weighted_closed_face_sum(P, active, f):
    total = YPolynomial()
    for a, s in oracle.face_point_sums(P, f).items():
        if a >= active:
            total = total + YPolynomial.one_plus_y_power(oracle.carrier_dim(P, a)) * s
    return total


def guillemin_face_sum(P: LatticePolytope, f: Polynomial | None = None, backend=None,
                       order=None, method="symbolic"):
    """Sum over faces of the group-averaged operators applied to face integrals of E(h)."""
    f = _one(P) if f is None else f
    order = _order_for(P, f, order)
    total = 0
    field_used = EXACT
    for E, op in guillemin_operators(P, backend, order):
        Q = integral_h_polynomial(P, f, face=E, method=method)
        total = total + apply(op, Q)
        if op.field == COMPLEX:
            field_used = COMPLEX
    return total, field_used


def guillemin_verify(P, f, backend=None, order=None, tol=DEFAULT_TOL, method="symbolic"):
    val, used = guillemin_face_sum(P, f, backend, order, method)
    lat = oracle.lattice_sum(P, f)
    res, ok, t = _compare(val, lat, used, tol)
    return EMReport("guillemin", val, lat, res, used, t, ok, {})


def stokes_verify(P: LatticePolytope, f: Polynomial, m0) -> EMReport:
    """int_P d f/d m0 = - sum_rho <m0, u_rho> int_{facet rho} f, exactly."""
    m0 = tuple(Fraction(x) for x in m0)
    df = Polynomial.constant(P.dim, 0)
    for i, c in enumerate(m0):
        if c:
            df = df + f.derivative(i) * c
    lhs = integrate_polynomial(P, df)
    rhs = Fraction(0)
    for i, fc in enumerate(P.facets):
        c = dot(m0, fc.u)
        if c:
            rhs -= c * integrate_polynomial(P, f, P.facet_face(i))
    return EMReport("stokes", lhs, rhs, lhs - rhs, EXACT, None, lhs == rhs,
                    {"m0": [str(x) for x in m0]})


def pick_verify(P: LatticePolytope, backend=None, tol=DEFAULT_TOL) -> EMReport:
    op = todd_operator(P, backend, P.dim)
    used = op.field if op.field == COMPLEX else EXACT
    r = pick_coefficients(P, backend)
    from .polytope import volume
    total = sum((r[F.active] * volume(P, F) for F in P.faces), 0)
    signed = sum(((-1) ** (P.dim - F.dim) * r[F.active] * volume(P, F) for F in P.faces), 0)
    count = oracle.count(P)
    interior = oracle.interior_count(P)
    res1, ok1, t = _compare(total, count, used, tol)
    res2, ok2, _ = _compare(signed, interior, used, tol)
    res = res1 if not ok1 or ok2 else res2
    return EMReport("pick", [total, signed], [count, interior], res, used, t, ok1 and ok2,
                    {"coefficients": {",".join(map(str, sorted(a))): c for a, c in r.items()}})


def vertex_specialization_check(P: LatticePolytope, f: Polynomial | None = None, backend=None,
                                tol=DEFAULT_TOL) -> EMReport:
    """sum over vertices of (p_{sigma_v}(d/dm) f)(0) against the dilation sum at k = 0."""
    f = _one(P) if f is None else f
    degree = P.dim + max(f.degree, 0)
    op = todd_operator(P, backend, degree)
    used = op.field if op.field == COMPLEX else EXACT
    reduced = reduced_face_operators(P, op, degree)
    origin = (Fraction(0),) * P.dim
    total = 0
    for a in P.vertex_active:
        q = reduced.get(a)
        if q is not None:
            total = total + _apply_t(q, f).evaluate(origin)
    lat = oracle.dilation_sum_at_zero(P, f)
    f0 = f.evaluate(origin)
    res, ok, t = _compare(total, lat, used, tol)
    _, ok0, _ = _compare(total, f0, used, tol)
    return EMReport("vertex_spec", total, lat, res, used, t, ok and ok0, {"f(0)": f0})


def face_derivative_check(P: LatticePolytope, f: Polynomial, face) -> bool:
    """mult(sigma_E) prod_{rho in sigma_E} d/dh_rho int_{P(h)} f = int_{E(h)} f at h = 0."""
    E = _face_of(P, face)
    Q = integral_h_polynomial(P, f)
    for rho in sorted(E.active):
        Q = Q.derivative(rho)
    mult = multiplicity(normal_fan(P).cone(E.active))
    zero = (Fraction(0),) * P.num_facets
    return Q.evaluate(zero) * mult == integrate_polynomial(P, f, E)


def disjoint_facets_check(P: LatticePolytope, f: Polynomial) -> bool:
    """Mixed h-derivatives across facets that do not meet vanish identically."""
    Q = integral_h_polynomial(P, f)
    cones = {frozenset(s) for a in P.vertex_active for s in _subsets(a)}
    for i in range(P.num_facets):
        for j in range(i + 1, P.num_facets):
            if frozenset({i, j}) not in cones and not Q.derivative(i).derivative(j).is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# tangent-cone (local) identities


def local_em_verify(P: LatticePolytope, v, kind="todd", z=None, scale=Fraction(1), *,
                    y=Fraction(0), order=24, tol=DEFAULT_TOL, floor=Fraction(1, 1024)) -> EMReport:
    """Operator at x_i = -<m_i, z> against the numerically evaluated tangent-cone sum.

    m_i is the basis dual to the facet normals at v; the operator side is
    multiplied by the integral of e^{<m,z>} over the tangent cone.
    """
    _require_simple(P)
    vid = v if isinstance(v, int) else P.vertex_index(v)
    vert = P.vertices[vid]
    rays = sorted(P.vertex_active[vid])
    sigma = Cone([P.facets[i].u for i in rays], "N", P.dim, reduce=False)
    U = [P.facets[i].u for i in rays]
    Uinv = inverse(U)
    mdual = [tuple(Uinv[j][i] for j in range(P.dim)) for i in range(P.dim)]
    if z is None:
        z = tuple(-sum((k + 1) * u[j] for k, u in enumerate(U)) for j in range(P.dim))
    z = tuple(Fraction(x) for x in z)
    lam = solve([list(c) for c in zip(*U)], [-x for x in z])
    if any(c <= 0 for c in lam):
        raise GeometryError("-z is not in the interior of the vertex cone")
    G = group_data(sigma)
    mult = len(G)
    y = Fraction(y) if kind == "weighted" else Fraction(0)
    base = {"todd": "todd", "dual": "dual", "weighted": "weighted"}.get(kind)
    if base is None:
        raise SchemaError(f"unknown local kind {kind!r}")
    C = vertex_cone(P, vid)
    scale = Fraction(scale)
    while scale >= floor:
        zs = tuple(scale * x for x in z)
        xs = [-float(dot(m, zs)) for m in mdual]

        def op_value(N):
            terms = [(Fraction(1), tuple(univariate_factor(base, g, N) for g in el.gamma))
                     for el in G]
            return OperatorSeries(P.dim, N, terms, COMPLEX).evaluate(xs, y)
        a, b = op_value(order), op_value(order + 8)
        if abs(a - b) <= tol * 1e-2 * max(1.0, abs(b)):
            break
        scale /= 2
    else:
        raise ConvergenceError(
            f"operator series does not converge at order {order}; try a scale below {floor}")
    cont = cmath.exp(float(dot(vert, zs))) / mult / math.prod(xs)
    op_side = b * cont
    if kind == "todd":
        S = cone_exp_sum(C, vert)
        K = ()
    elif kind == "dual":
        S = relint_exp_sum(C, vert)
        K = range(P.dim)
    else:
        S = weighted_vertex_sum(P, vert)
        K = ()
    lat = evaluate_at(S, zs, y)
    molien = facets_removed_cone_sum(sigma, K)
    cross = evaluate_at(molien, zs, y) * cmath.exp(float(dot(vert, zs)))
    res = abs(op_side - lat) / max(1.0, abs(lat))
    cross_res = abs(cross - lat) / max(1.0, abs(lat))
    ok = res < tol and cross_res < tol
    return EMReport("local", op_side, lat, res, COMPLEX, tol, ok,
                    {"vertex": vid, "kind": kind, "scale": str(scale),
                     "z": [str(x) for x in z], "molien_residual": cross_res})
