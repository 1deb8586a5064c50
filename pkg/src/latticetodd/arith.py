"""Exact integer and rational linear algebra, polynomials and truncated series.

Everything here works over ``fractions.Fraction`` unless a function says
otherwise.  Matrices are tuples of row tuples; vectors are tuples.
"""

from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from functools import lru_cache, reduce

from .errors import InterpolationError


# ---------------------------------------------------------------------------
# scalars


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a Fraction, rejecting floats."""
    s = text.strip()
    if not s or any(ch in s for ch in ".eE"):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(s)


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def root_of_unity(gamma) -> complex:
    """exp(2*pi*i*gamma), exact for quarter turns."""
    g = Fraction(gamma) % 1
    exact = {Fraction(0): 1 + 0j, Fraction(1, 2): -1 + 0j,
             Fraction(1, 4): 1j, Fraction(3, 4): -1j}
    if g in exact:
        return exact[g]
    return cmath.exp(2j * math.pi * g.numerator / g.denominator)


# ---------------------------------------------------------------------------
# vectors and matrices


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), 0)


def identity(n: int):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(A):
    return tuple(zip(*A))


def matmul(A, B):
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def matvec(A, v):
    return tuple(dot(row, v) for row in A)


def primitive(v):
    """Divide an integer vector by the gcd of its entries."""
    v = tuple(int(x) for x in v)
    g = reduce(math.gcd, v, 0)
    if g == 0:
        raise ValueError("primitive() of the zero vector")
    return tuple(x // g for x in v)


def integral_multiple(v):
    """Smallest positive integer multiple of a rational vector, made primitive."""
    v = [Fraction(x) for x in v]
    den = reduce(math.lcm, (x.denominator for x in v), 1)
    return primitive(int(x * den) for x in v)


def _row_reduce(rows, ncols):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    M = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows) -> int:
    rows = [tuple(r) for r in rows]
    if not rows:
        return 0
    return len(_row_reduce(rows, len(rows[0]))[1])


def solve(A, b):
    """Unique solution of the square system A x = b over Q."""
    n = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(n)]
    R, piv = _row_reduce(aug, n + 1)
    if len(piv) != n or piv[-1] == n:
        raise ZeroDivisionError("singular system")
    return tuple(R[i][n] for i in range(n))


def inverse(A):
    n = len(A)
    aug = [list(A[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    R, piv = _row_reduce(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(R[i][n:]) for i in range(n))


def nullspace(rows, ncols):
    """Basis of {x : rows . x = 0} over Q."""
    R, piv = _row_reduce(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, p in zip(R, piv):
            x[p] = -r[f]
        basis.append(tuple(x))
    return basis


def det(A):
    """Determinant over any commutative ring (Laplace for n <= 4)."""
    n = len(A)
    if n == 0:
        return 1
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if n <= 4:
        total = 0
        for j in range(n):
            if A[0][j] == 0:
                continue
            minor = [row[:j] + row[j + 1:] for row in A[1:]]
            term = A[0][j] * det(minor)
            total = total + term if j % 2 == 0 else total - term
        return total
    M = [[Fraction(x) for x in row] for row in A]
    sign = 1
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            sign = -sign
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return sign * math.prod(M[i][i] for i in range(n))


def snf(A):
    """Smith normal form: returns (D, U, V) with U*A*V = D.

    D is diagonal with nonnegative entries d_1 | d_2 | ...; U and V are
    unimodular integer matrices.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for M in (D, V):
            for row in M:
                row[dst] += f * row[src]

    for t in range(min(m, n)):
        entries = [(abs(D[i][j]), i, j) for i in range(t, m)
                   for j in range(t, n) if D[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
            rest = [(abs(D[i][t]), i, None) for i in range(t + 1, m) if D[i][t]]
            rest += [(abs(D[t][j]), None, j) for j in range(t + 1, n) if D[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda e: e[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return (tuple(map(tuple, D)), tuple(map(tuple, U)), tuple(map(tuple, V)))


def snf_diagonal(A):
    D, _, _ = snf(A)
    return tuple(D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)))


class SpanLattice:
    """Integer basis of Span(vectors) ∩ Z^n together with a complement.

    ``coords(x)`` gives the coordinates of an integral (or rational) vector of
    the span in the basis; ``quotient(x)`` is the projection Z^n -> Z^n / span.
    """

    def __init__(self, vectors, ambient_dim: int):
        self.ambient_dim = ambient_dim
        rows = [integral_multiple(v) for v in vectors if any(v)]
        if rows:
            D, _, V = snf(rows)
            k = sum(1 for i in range(min(len(D), ambient_dim)) if D[i][i])
        else:
            V = identity(ambient_dim)
            k = 0
        Vinv = tuple(tuple(int(x) for x in row) for row in inverse(V))
        self.rank = k
        self._V = V
        self.basis = Vinv[:k]
        self.complement = Vinv[k:]

    def full_coords(self, x):
        return tuple(dot(x, col) for col in transpose(self._V))

    def coords(self, x):
        c = self.full_coords(x)
        if any(c[self.rank:]):
            raise ValueError(f"{x} is not in the span")
        return c[:self.rank]

    def quotient(self, x):
        return self.full_coords(x)[self.rank:]

    def ambient_functional(self, phi):
        """Vector w with <w, x> = phi . coords(x) for every x in the span."""
        k = len(phi)
        return tuple(sum((self._V[j][i] * phi[i] for i in range(k)), 0)
                     for j in range(self.ambient_dim))

    def lift(self, c):
        return tuple(sum((ci * b[j] for ci, b in zip(c, self.basis)), 0)
                     for j in range(self.ambient_dim))


# ---------------------------------------------------------------------------
# Bernoulli numbers and univariate series (coefficient lists)


@lru_cache(maxsize=None)
def _bernoulli_plus(k: int) -> Fraction:
    # Akiyama-Tanigawa table; yields the B_1 = +1/2 convention
    row = [Fraction(1, j + 1) for j in range(k + 1)]
    for _ in range(k):
        row = [(j + 1) * (row[j] - row[j + 1]) for j in range(len(row) - 1)]
    return row[0]


def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k with B_1 = -1/2."""
    if k < 0:
        raise ValueError("negative index")
    b = _bernoulli_plus(k)
    return -b if k == 1 else b


@lru_cache(maxsize=None)
def todd_coefficients(order: int) -> tuple:
    """Coefficients of x/(1 - e^{-x}) = 1 + x/2 + x^2/12 - x^4/720 + ..."""
    return tuple(bernoulli(k) * (-1) ** k / math.factorial(k) for k in range(order + 1))


def exp_coefficients(a, order: int) -> tuple:
    """Coefficients of e^{a x} up to x^order."""
    out = [1]
    for k in range(1, order + 1):
        out.append(out[-1] * a / k)
    if isinstance(a, Fraction) or isinstance(a, int):
        return tuple(Fraction(c) for c in out)
    return tuple(out)


def series_mul(a, b, order: int) -> tuple:
    out = [0] * (order + 1)
    for i, x in enumerate(a[:order + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[:order + 1 - i]):
            out[i + j] = out[i + j] + x * y
    return tuple(out)


def series_inverse(a, order: int) -> tuple:
    """Inverse of a power series with nonzero constant term."""
    if a[0] == 0:
        raise ZeroDivisionError("series has no constant term")
    inv0 = 1 / a[0] if not isinstance(a[0], int) else Fraction(1, a[0])
    out = [inv0]
    for k in range(1, order + 1):
        s = sum((a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1)), 0)
        out.append(-s * inv0)
    return tuple(out)


# ---------------------------------------------------------------------------
# polynomials in y


class YPolynomial:
    """Polynomial in a single formal parameter y; coefficients ascending."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def y(cls):
        return cls((0, 1))

    @classmethod
    def one_plus_y_power(cls, k: int):
        if k < 0:
            raise ValueError("negative power of 1+y is not a polynomial")
        return cls(math.comb(k, j) for j in range(k + 1))

    @classmethod
    def from_one_plus_y_basis(cls, coeffs):
        out = cls()
        for k, c in enumerate(coeffs):
            out = out + cls.one_plus_y_power(k) * c
        return out

    @staticmethod
    def lift(x):
        return x if isinstance(x, YPolynomial) else YPolynomial((x,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, y):
        out = 0
        for c in reversed(self.coeffs):
            out = out * y + c
        return out

    def __add__(self, other):
        other = YPolynomial.lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return YPolynomial(self.coefficient(i) + other.coefficient(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return YPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-YPolynomial.lift(other))

    def __rsub__(self, other):
        return YPolynomial.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, YPolynomial):
            if other == 0:
                return YPolynomial()
            return YPolynomial(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return YPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return YPolynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return YPolynomial(c / scalar for c in self.coeffs)

    def __pow__(self, k: int):
        out = YPolynomial((1,))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, YPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, float, complex, Fraction)):
            return self.coeffs == (YPolynomial((other,)).coeffs)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def one_plus_y_basis(self):
        """Coefficients c_k with self = sum c_k (1+y)^k."""
        out = []
        q = self
        while q.coeffs:
            value_at_minus_one = q(-1)
            out.append(value_at_minus_one)
            q = (q - value_at_minus_one).exact_div_one_plus_y()
        return tuple(out)

    def exact_div_one_plus_y(self, k: int = 1):
        """Divide by (1+y)^k, raising if the division is not exact."""
        q = self
        for _ in range(k):
            c = q.coeffs
            if not c:
                return q
            b = [0] * (len(c) - 1)
            acc = 0
            for i in range(len(c) - 1, 0, -1):
                acc = c[i] - acc
                b[i - 1] = acc
            if c[0] - acc != 0:
                raise ArithmeticError("not divisible by (1+y)")
            q = YPolynomial(b)
        return q

    def __repr__(self):
        if not self.coeffs:
            return "YPolynomial(0)"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            parts.append(f"{c}" if k == 0 else f"{c}*y" if k == 1 else f"{c}*y^{k}")
        return "YPolynomial(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# Laurent series in t


class LaurentSeries:
    """sum_{k=low}^{order} c_k t^k + O(t^{order+1}).

    Coefficients may be Fractions, YPolynomials or complex numbers.
    """

    __slots__ = ("low", "coeffs", "order")

    def __init__(self, low: int, coeffs, order: int):
        coeffs = tuple(coeffs)[: max(order - low + 1, 0)]
        coeffs = coeffs + (0,) * (order - low + 1 - len(coeffs))
        self.low = low
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def zero(cls, order: int):
        return cls(0, (), order)

    def __getitem__(self, k):
        if k > self.order:
            raise IndexError(f"t^{k} lies beyond the truncation order {self.order}")
        i = k - self.low
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    coefficient = __getitem__

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries(0, (other,), self.order)
        order = min(self.order, other.order)
        low = min(self.low, other.low)
        return LaurentSeries(low, (self[k] + other[k] for k in range(low, order + 1)), order)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.low, (-c for c in self.coeffs), self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return LaurentSeries(self.low, (c * other for c in self.coeffs), self.order)
        low = self.low + other.low
        order = min(self.order + other.low, other.order + self.low)
        out = [0] * (order - low + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= len(out):
                    break
                out[k] = out[k] + a * b
        return LaurentSeries(low, out, order)

    __rmul__ = __mul__

    def principal_part(self):
        return tuple(self[k] for k in range(self.low, 0))

    def __repr__(self):
        terms = ", ".join(f"t^{k}: {self[k]}" for k in range(self.low, self.order + 1)
                          if self[k] != 0)
        return f"LaurentSeries({terms}; O(t^{self.order + 1}))"


def exp_series(a, order: int) -> LaurentSeries:
    """e^{a t} as a Laurent series (no pole)."""
    return LaurentSeries(0, exp_coefficients(a, max(order, 0)), order)


def laurent_inverse_one_minus_exp(a, order: int) -> LaurentSeries:
    """1/(1 - e^{a t}) = -sum_k B_k a^{k-1} t^{k-1} / k!, valid for a != 0."""
    a = Fraction(a)
    if a == 0:
        raise ZeroDivisionError("1/(1-e^0) has a pole at the identity")
    coeffs = [-bernoulli(k) * a ** (k - 1) / math.factorial(k) for k in range(order + 2)]
    return LaurentSeries(-1, coeffs, order)


def inverse_one_minus_root_exp(zeta: complex, a, order: int) -> LaurentSeries:
    """1/(1 - zeta e^{a t}) for a root of unity zeta != 1 (regular at t = 0)."""
    base = [-zeta * c for c in exp_coefficients(float(a), order)]
    base[0] += 1
    return LaurentSeries(0, series_inverse(base, order), order)


# ---------------------------------------------------------------------------
# sparse multivariate polynomials

_SHIFT = 16
_MASK = (1 << _SHIFT) - 1


def _pack(exps) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MASK:
            raise ValueError("exponent out of range")
        key |= e << (_SHIFT * i)
    return key


def _unpack(key: int, n: int) -> tuple:
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(n))


class Polynomial:
    """Sparse polynomial in ``nvars`` variables with exact coefficients.

    Coefficients are Fractions by default but any commutative ring element
    that mixes with Fractions (YPolynomial, complex) is accepted.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        packed = {}
        for exps, c in (terms or {}).items():
            if len(exps) != nvars:
                raise ValueError("exponent length does not match nvars")
            if c != 0:
                k = _pack(exps)
                packed[k] = packed.get(k, 0) + c
        self._terms = {k: c for k, c in packed.items() if c != 0}

    @classmethod
    def _raw(cls, nvars, packed):
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = packed
        return p

    @classmethod
    def constant(cls, nvars: int, c=1):
        return cls._raw(nvars, {0: c} if c != 0 else {})

    @classmethod
    def variable(cls, nvars: int, i: int):
        return cls._raw(nvars, {1 << (_SHIFT * i): Fraction(1)})

    @classmethod
    def linear(cls, nvars: int, coeffs, const=0):
        d = {}
        if const != 0:
            d[0] = const
        for i, c in enumerate(coeffs):
            if c != 0:
                d[1 << (_SHIFT * i)] = c
        return cls._raw(nvars, d)

    def terms(self):
        """Dict exponent tuple -> coefficient, in sorted order."""
        items = sorted((_unpack(k, self.nvars), c) for k, c in self._terms.items())
        return dict(items)

    def items(self):
        return self.terms().items()

    def coefficient(self, exps):
        return self._terms.get(_pack(exps), 0)

    @property
    def degree(self) -> int:
        return max((sum(_unpack(k, self.nvars)) for k in self._terms), default=-1)

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def constant_term(self):
        return self._terms.get(0, 0)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials over different variable counts")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if other == 0:
                return Polynomial._raw(self.nvars, {})
            return Polynomial._raw(self.nvars, {k: c * other for k, c in self._terms.items()})
        other = self._coerce(other)
        out = {}
        get = out.get
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 + k2
                out[k] = get(k, 0) + c1 * c2
        return Polynomial._raw(self.nvars, {k: c for k, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial._raw(self.nvars, {k: c / scalar for k, c in self._terms.items()})

    def __pow__(self, e: int):
        out = Polynomial.constant(self.nvars, Fraction(1))
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({0: other} if other != 0 else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point):
        total = 0
        for k, c in self._terms.items():
            term = c
            for i, e in enumerate(_unpack(k, self.nvars)):
                if e:
                    term = term * point[i] ** e
            total = total + term
        return total

    def derivative(self, i: int, times: int = 1):
        out = {}
        for k, c in self._terms.items():
            e = (k >> (_SHIFT * i)) & _MASK
            if e < times:
                continue
            out[k - (times << (_SHIFT * i))] = c * math.perm(e, times)
        return Polynomial._raw(self.nvars, out)

    def compose(self, subs):
        """Substitute variable i by the polynomial subs[i] (common nvars)."""
        target = subs[0].nvars if subs else 0
        powers = [[Polynomial.constant(target, Fraction(1))] for _ in subs]
        out = Polynomial._raw(target, {})
        for k, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, e in enumerate(_unpack(k, self.nvars)):
                if e:
                    pw = powers[i]
                    while len(pw) <= e:
                        pw.append(pw[-1] * subs[i])
                    term = term * pw[e]
            out = out + term
        return out

    def homogeneous_parts(self):
        parts = {}
        for k, c in self._terms.items():
            d = sum(_unpack(k, self.nvars))
            parts.setdefault(d, {})[k] = c
        return {d: Polynomial._raw(self.nvars, t) for d, t in sorted(parts.items())}

    def map_coefficients(self, fn):
        out = {k: fn(c) for k, c in self._terms.items()}
        return Polynomial._raw(self.nvars, {k: c for k, c in out.items() if c != 0})

    def embed(self, nvars: int, positions):
        """Rename variable i to ``positions[i]`` inside a larger ring."""
        out = {}
        for k, c in self._terms.items():
            exps = [0] * nvars
            for i, e in enumerate(_unpack(k, self.nvars)):
                exps[positions[i]] += e
            out[_pack(exps)] = c
        return Polynomial._raw(nvars, out)

    def __repr__(self):
        if not self._terms:
            return "Polynomial(0)"
        parts = []
        for exps, c in self.terms().items():
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}"
                            for i, e in enumerate(exps) if e)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "Polynomial(" + " + ".join(parts) + ")"


def monomials_up_to(nvars: int, degree: int):
    """All exponent tuples of total degree <= degree, graded then lex."""
    out = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            exps = [0] * nvars
            for i in combo:
                exps[i] += 1
            out.append(tuple(exps))
    return out


# ---------------------------------------------------------------------------
# interpolation


def interpolate_univariate(xs, ys):
    """Coefficients (ascending) of the interpolating polynomial, exact."""
    xs = [Fraction(x) for x in xs]
    coef = [Fraction(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [s - xs[i] * p for s, p in zip(shifted, poly)]
        poly[0] += coef[i]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def interpolate_multivariate(samples, degree_bound: int, num_vars: int) -> Polynomial:
    """Unique polynomial of total degree <= degree_bound through the samples."""
    monos = monomials_up_to(num_vars, degree_bound)
    rows = []
    for point, value in samples:
        point = [Fraction(x) for x in point]
        row = [math.prod((p ** e for p, e in zip(point, m)), start=Fraction(1)) for m in monos]
        rows.append(row + [Fraction(value)])
    if len(rows) < len(monos):
        raise InterpolationError(
            f"{len(rows)} samples cannot determine {len(monos)} coefficients "
            f"(degree {degree_bound} in {num_vars} variables)")
    R, piv = _row_reduce(rows, len(monos) + 1)
    if len(monos) in piv:
        raise InterpolationError("samples are inconsistent with the degree bound")
    if len(piv) < len(monos):
        missing = [monos[c] for c in range(len(monos)) if c not in piv]
        raise InterpolationError(
            f"grid is not poised: rank {len(piv)} < {len(monos)}; "
            f"undetermined monomials {missing[:4]}")
    return Polynomial(num_vars, {monos[c]: R[i][-1] for i, c in enumerate(piv)})


def interpolate_simplex_grid(func, num_vars: int, degree: int, step) -> Polynomial:
    """Interpolate on the principal lattice {step * a : |a| <= degree}.

    Uses multivariate Newton forward differences, so no linear system is
    solved.  ``func`` receives a tuple of Fractions.
    """
    step = Fraction(step)
    grid = monomials_up_to(num_vars, degree)
    table = {a: func(tuple(step * x for x in a)) for a in grid}
    for i in range(num_vars):
        for j in range(1, degree + 1):
            for a in sorted((a for a in grid if a[i] >= j), key=lambda a: -a[i]):
                below = a[:i] + (a[i] - 1,) + a[i + 1:]
                table[a] = table[a] - table[below]
    falling = {}

    def newton_basis(var, e):
        # prod_{j<e} (h - j*step) as a univariate coefficient list
        if (var, e) not in falling:
            coeffs = [Fraction(1)]
            for j in range(e):
                shifted = [Fraction(0)] + coeffs
                coeffs = [s - j * step * c for s, c in zip(shifted, coeffs + [Fraction(0)])]
            falling[(var, e)] = coeffs
        return falling[(var, e)]

    result = {}
    for a in grid:
        c = table[a]
        if c == 0:
            continue
        c = c / (math.prod(math.factorial(x) for x in a) * step ** sum(a))
        factors = [newton_basis(i, e) for i, e in enumerate(a)]
        for exps in itertools.product(*(range(len(f)) for f in factors)):
            coef = math.prod((f[e] for f, e in zip(factors, exps)), start=Fraction(1))
            if coef:
                result[exps] = result.get(exps, 0) + c * coef
    return Polynomial(num_vars, result)
