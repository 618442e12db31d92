"""Exact rational and certified symbolic arithmetic, small matrices, lattices.

Rationals are :class:`fractions.Fraction`.  Irrational data (lengths of edges,
entries of period matrices) are :class:`SymbolicReal` polynomials in declared
symbols, each carrying a rational enclosure interval.  Signs of symbolic values
are certified by interval evaluation with bisection.

Matrices are tuples of row tuples; vectors are tuples.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, IndeterminateSign, InputError, SingularMatrix

REFINEMENT_ROUNDS = 16
MAX_BOXES = 4096


# ---------------------------------------------------------------- rationals


def as_rational(x) -> Fraction:
    """Parse ints, Fractions and strings like ``"3/7"``, ``"-2"`` or ``"0.15"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {x!r}") from exc
    if isinstance(x, float):
        raise InputError("floats are not accepted; pass rationals as 'p/q' strings")
    raise InputError(f"not a rational: {x!r}")


def fmt_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def as_vector(v) -> tuple:
    return tuple(as_rational(c) for c in v)


def content(v) -> int:
    """gcd of an integer vector (0 for the zero vector)."""
    g = 0
    for c in v:
        g = math.gcd(g, int(c))
    return g


def primitive(v) -> tuple[tuple[int, ...], int]:
    """Split a nonzero integer vector as ``content * primitive``."""
    g = content(v)
    if g == 0:
        raise InputError("zero vector has no primitive direction")
    return tuple(int(c) // g for c in v), g


def rational_content(v) -> tuple[tuple[int, ...], Fraction]:
    """Write a nonzero rational vector as ``t * u`` with ``u`` primitive integral, ``t > 0``."""
    v = as_vector(v)
    den = 1
    for c in v:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in v]
    u, g = primitive(ints)
    return u, Fraction(g, den)


def floor_vec(v):
    return tuple(math.floor(c) for c in v)


# ---------------------------------------------------------------- symbols


class Sign(enum.Enum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1

    def __str__(self):
        return self.name.capitalize()


@dataclass(frozen=True)
class SymbolSet:
    """Named irrational symbols with rational enclosures.

    ``independent`` declares that the symbols together with 1 are linearly
    independent over Q.  The declaration is trusted, never checked.
    """

    names: tuple[str, ...]
    enclosures: tuple[tuple[Fraction, Fraction], ...]
    independent: bool = True

    def __post_init__(self):
        if len(self.names) != len(self.enclosures):
            raise DimensionMismatch("one enclosure per symbol required")
        if len(set(self.names)) != len(self.names):
            raise InputError("duplicate symbol names")
        for name, (lo, hi) in zip(self.names, self.enclosures):
            if not lo < hi:
                raise InputError(f"empty enclosure for {name}: [{lo}, {hi}]")

    @classmethod
    def create(cls, enclosures: dict, independent=True):
        names = tuple(enclosures)
        encl = tuple((as_rational(enclosures[n][0]), as_rational(enclosures[n][1])) for n in names)
        return cls(names, encl, independent)

    def index(self, name):
        return self.names.index(name)

    def symbol(self, name) -> "SymbolicReal":
        i = self.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(self.names)))
        return SymbolicReal({mono: Fraction(1)}, self)

    def symbols(self):
        return tuple(self.symbol(n) for n in self.names)

    def refine(self, name, lo, hi) -> "SymbolSet":
        """Return a copy with a narrower enclosure; widening is rejected."""
        lo, hi = as_rational(lo), as_rational(hi)
        i = self.index(name)
        old_lo, old_hi = self.enclosures[i]
        if lo < old_lo or hi > old_hi:
            raise InputError(f"refinement of {name} must shrink its enclosure")
        encl = list(self.enclosures)
        encl[i] = (lo, hi)
        return SymbolSet(self.names, tuple(encl), self.independent)

    def to_json(self):
        return {n: [fmt_rational(lo), fmt_rational(hi)] for n, (lo, hi) in zip(self.names, self.enclosures)}


def _interval_pow(lo, hi, e):
    if e == 0:
        return Fraction(1), Fraction(1)
    a, b = lo**e, hi**e
    if e % 2 == 0 and lo < 0 < hi:
        return Fraction(0), max(a, b)
    return min(a, b), max(a, b)


def _interval_mul(a, b):
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(prods), max(prods)


@dataclass(frozen=True, eq=False)
class SymbolicReal:
    """A polynomial with rational coefficients in the symbols of a SymbolSet."""

    terms: dict
    symbols: SymbolSet | None = None

    def __post_init__(self):
        clean = {m: Fraction(c) for m, c in self.terms.items() if c != 0}
        object.__setattr__(self, "terms", clean)

    # construction helpers
    @staticmethod
    def lift(x, symbols=None) -> "SymbolicReal":
        if isinstance(x, SymbolicReal):
            return x
        x = as_rational(x)
        nsym = len(symbols.names) if symbols else 0
        return SymbolicReal({(0,) * nsym: x}, symbols)

    def _coerce(self, other):
        if isinstance(other, SymbolicReal):
            if self.symbols is None and other.symbols is not None:
                return other._with(self), other
            if other.symbols is None and self.symbols is not None:
                return self, self._with(other)
            if self.symbols is not None and other.symbols is not None and self.symbols.names != other.symbols.names:
                raise InputError("cannot combine values over different symbol sets")
            return self, other
        if isinstance(other, (int, Fraction)):
            return self, SymbolicReal.lift(other, self.symbols)
        return NotImplemented, NotImplemented

    def _with(self, const_poly):
        """Re-express a symbol-free polynomial over this value's symbols."""
        nsym = len(self.symbols.names)
        return SymbolicReal({(0,) * nsym: c for _, c in const_poly.terms.items()}, self.symbols)

    # arithmetic
    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        out = dict(a.terms)
        for m, c in b.terms.items():
            out[m] = out.get(m, 0) + c
        return SymbolicReal(out, a.symbols or b.symbols)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicReal({m: -c for m, c in self.terms.items()}, self.symbols)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        out = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return SymbolicReal(out, a.symbols or b.symbols)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, SymbolicReal) and other.is_rational():
            return self * (1 / other.constant())
        raise InputError("division by a symbolic value is not supported")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymbolicReal.lift(other)
        if not isinstance(other, SymbolicReal):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        if self.is_rational():
            return hash(self.constant())
        return hash(frozenset(self.terms.items()))

    # inspection
    def is_zero(self):
        return not self.terms

    def is_rational(self):
        return all(not any(m) for m in self.terms)

    def constant(self) -> Fraction:
        for m, c in self.terms.items():
            if not any(m):
                return c
        return Fraction(0)

    def degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def linear_part(self):
        """Coefficient vector of the degree-1 terms (requires degree <= 1)."""
        if self.degree() > 1:
            raise InputError("value is not affine in its symbols")
        n = len(self.symbols.names) if self.symbols else 0
        coeffs = [Fraction(0)] * n
        for m, c in self.terms.items():
            if any(m):
                coeffs[m.index(1)] = c
        return tuple(coeffs)

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for x, e in zip(point, m):
                if e:
                    term *= x**e
            total += term
        return total

    def interval(self, box):
        lo = hi = Fraction(0)
        for m, c in self.terms.items():
            iv = (Fraction(1), Fraction(1))
            for (blo, bhi), e in zip(box, m):
                if e:
                    iv = _interval_mul(iv, _interval_pow(blo, bhi, e))
            a, b = c * iv[0], c * iv[1]
            lo += min(a, b)
            hi += max(a, b)
        return lo, hi

    def enclosure(self):
        if self.symbols is None:
            c = self.constant()
            return c, c
        return self.interval(self.symbols.enclosures)

    def to_json(self):
        if self.is_rational():
            return fmt_rational(self.constant())
        return {",".join(map(str, m)): fmt_rational(c) for m, c in sorted(self.terms.items())}

    def __repr__(self):
        if self.is_rational():
            return fmt_rational(self.constant())
        names = self.symbols.names
        parts = []
        for m, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
            parts.append(f"{fmt_rational(c)}*{mono}" if mono else fmt_rational(c))
        return " + ".join(parts)


def sym_from_json(data, symbols: SymbolSet | None):
    """Decode a rational string/int or a ``{monomial: coeff}`` dict."""
    if isinstance(data, dict):
        if symbols is None:
            raise InputError("symbolic entry without a symbol set")
        terms = {}
        for key, c in data.items():
            mono = tuple(int(e) for e in key.split(",")) if key else ()
            if len(mono) != len(symbols.names):
                raise DimensionMismatch(f"monomial {key!r} does not match {len(symbols.names)} symbols")
            terms[mono] = as_rational(c)
        return SymbolicReal(terms, symbols)
    return as_rational(data)


def is_symbolic(x):
    return isinstance(x, SymbolicReal) and not x.is_rational()


def to_rational(x) -> Fraction:
    if isinstance(x, SymbolicReal):
        if not x.is_rational():
            raise InputError("a rational value is required here")
        return x.constant()
    return as_rational(x)


def sign_of(x, budget: int = REFINEMENT_ROUNDS) -> Sign:
    """Certified sign of a rational or symbolic value.

    Zero is returned only for the zero polynomial.  Otherwise the enclosure box
    is bisected (at most ``budget`` levels deep) until interval evaluation
    excludes 0 on every sub-box; a sign change witnessed inside the box, or an
    exhausted budget, raises :class:`IndeterminateSign`.
    """
    if not isinstance(x, SymbolicReal):
        x = as_rational(x)
        return Sign.ZERO if x == 0 else (Sign.POSITIVE if x > 0 else Sign.NEGATIVE)
    if x.is_zero():
        return Sign.ZERO
    if x.is_rational():
        return sign_of(x.constant())
    result = None
    stack = [(tuple(x.symbols.enclosures), 0)]
    boxes = 0
    while stack:
        box, depth = stack.pop()
        boxes += 1
        lo, hi = x.interval(box)
        if lo > 0 or hi < 0:
            s = Sign.POSITIVE if lo > 0 else Sign.NEGATIVE
            if result is None:
                result = s
            elif result is not s:
                raise IndeterminateSign(f"{x!r} changes sign over the enclosures")
            continue
        mid = tuple((a + b) / 2 for a, b in box)
        mid_sign = sign_of(x.evaluate(mid))
        if mid_sign is Sign.ZERO or (result is not None and mid_sign is not result):
            raise IndeterminateSign(f"{x!r} is not sign-definite over the enclosures")
        if depth >= budget or boxes > MAX_BOXES:
            raise IndeterminateSign(f"sign of {x!r} undecided after {budget} refinements")
        widest = max(range(len(box)), key=lambda i: box[i][1] - box[i][0])
        a, b = box[widest]
        left = box[:widest] + ((a, mid[widest]),) + box[widest + 1 :]
        right = box[:widest] + ((mid[widest], b),) + box[widest + 1 :]
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    return result


# ---------------------------------------------------------------- matrices


def matrix(rows) -> tuple:
    rows = tuple(tuple(r) for r in rows)
    if rows and len({len(r) for r in rows}) != 1:
        raise DimensionMismatch("ragged matrix")
    return rows


def rat_matrix(rows) -> tuple:
    return matrix(tuple(as_rational(c) for c in r) for r in rows)


def identity(n) -> tuple:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def shape(m):
    return len(m), (len(m[0]) if m else 0)


def transpose(m):
    return tuple(zip(*m)) if m else ()


def _dot(a, b):
    total = 0
    for x, y in zip(a, b):
        total = total + x * y
    return total


def matmul(a, b):
    if shape(a)[1] != len(b):
        raise DimensionMismatch(f"cannot multiply {shape(a)} by {shape(b)}")
    bt = transpose(b)
    return tuple(tuple(_dot(r, c) for c in bt) for r in a)


def matvec(m, v):
    if shape(m)[1] != len(v):
        raise DimensionMismatch(f"cannot apply {shape(m)} matrix to length-{len(v)} vector")
    return tuple(_dot(r, v) for r in m)


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(t, a):
    return tuple(t * x for x in a)


def mat_scale(t, m):
    return tuple(tuple(t * x for x in r) for r in m)


def mat_equal(a, b):
    return shape(a) == shape(b) and all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_symbolic_matrix(m):
    return any(is_symbolic(x) for r in m for x in r)


def det(m):
    """Determinant: Leibniz expansion for symbolic entries, elimination otherwise."""
    n, k = shape(m)
    if n != k:
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    if is_symbolic_matrix(m):
        total = 0
        for perm in itertools.permutations(range(n)):
            inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
            term = 1
            for i, p in enumerate(perm):
                term = term * m[i][p]
            total = total + (-term if inv % 2 else term)
        return total
    a = [[to_rational(x) for x in r] for r in m]
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            result = -result
        result *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for j in range(c, n):
                    a[r][j] -= f * a[c][j]
    return result


def leading_minors(m):
    return [det(tuple(r[:i] for r in m[:i])) for i in range(1, len(m) + 1)]


def is_positive_definite(m) -> bool:
    """Sylvester's criterion with certified signs; ``m`` must be symmetric."""
    return all(sign_of(d) is Sign.POSITIVE for d in leading_minors(m))


def inverse(m):
    n, k = shape(m)
    if n != k:
        raise DimensionMismatch("inverse of a non-square matrix")
    a = [[to_rational(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return tuple(tuple(r[n:]) for r in a)


def solve(m, v):
    return matvec(inverse(m), v)


def nullspace(rows, ncols):
    """Basis of the rational nullspace of a (possibly empty) matrix."""
    a = [[as_rational(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -a[i][fc]
        basis.append(tuple(vec))
    return basis


def rank(rows, ncols):
    return ncols - len(nullspace(rows, ncols))


# ---------------------------------------------------------------- lattices


def lattice_solve(L, v):
    """Integral ``m`` with ``L m = v``, or ``None`` when ``L^{-1} v`` is not integral.

    Raises :class:`SingularMatrix` if ``det L = 0``.
    """
    if len(v) != len(L):
        raise DimensionMismatch("vector length does not match the lattice basis")
    if sign_of(det(L)) is Sign.ZERO:
        raise SingularMatrix("lattice basis is singular")
    x = solve(L, tuple(to_rational(c) for c in v))
    if any(c.denominator != 1 for c in x):
        return None
    return tuple(int(c) for c in x)


def reduce_mod_lattice(L, v):
    """Canonical representative ``v - L floor(L^{-1} v)``; coordinates in ``[0,1)^n``."""
    x = solve(L, v)
    return vec_sub(tuple(v), matvec(L, floor_vec(x)))


def _ext_gcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf_with_transform(L):
    """Column-style Hermite normal form ``H = L U`` with ``U`` unimodular.

    ``H`` is lower-trapezoidal: each pivot is positive and the entries to its
    left in the pivot row lie in ``[0, pivot)``.  Zero columns are moved last.
    """
    a = [[int(x) for x in r] for r in L]
    m = len(a)
    n = len(a[0]) if a else 0
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(j, k, p, q, r, s):
        # (col_j, col_k) <- (p col_j + q col_k, r col_j + s col_k)
        for mat in (a, u):
            for row in mat:
                x, y = row[j], row[k]
                row[j], row[k] = p * x + q * y, r * x + s * y

    col = 0
    pivots = []
    for i in range(m):
        if col >= n:
            break
        for k in range(col + 1, n):
            if a[i][k] == 0:
                continue
            x, y = a[i][col], a[i][k]
            g, p, q = _ext_gcd(x, y)
            colop(col, k, p, q, -y // g, x // g)
        if a[i][col] == 0:
            continue
        if a[i][col] < 0:
            for mat in (a, u):
                for row in mat:
                    row[col] = -row[col]
        piv = a[i][col]
        for j in range(col):
            q = a[i][j] // piv
            if q:
                for mat in (a, u):
                    for row in mat:
                        row[j] -= q * row[col]
        pivots.append((i, col))
        col += 1
    return tuple(tuple(r) for r in a), tuple(tuple(r) for r in u), col


def hnf(L):
    """Column-style Hermite normal form; spans the same Z-lattice as the columns of ``L``."""
    h, _, _ = hnf_with_transform(L)
    return h


def integer_kernel(rows, ncols):
    """Z-basis of ``{x in Z^ncols : rows . x = 0}`` for an integer matrix."""
    if not rows:
        return [tuple(int(i == j) for i in range(ncols)) for j in range(ncols)]
    _, u, r = hnf_with_transform(rows)
    return [tuple(u[i][j] for i in range(ncols)) for j in range(r, ncols)]


def integerize_rows(rows):
    """Scale each rational row by its common denominator."""
    out = []
    for r in rows:
        r = [as_rational(x) for x in r]
        den = 1
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append(tuple(int(x * den) for x in r))
    return out
