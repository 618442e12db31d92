"""Tropical affine tori ``R^n / M Z^n``, Albanese classes and polarizations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import exactnum as xn
from .errors import DimensionMismatch, HypothesisFailed, IndeterminateSign, InputError, NonzeroDegree
from .exactnum import Sign, SymbolicReal, sign_of

INDEPENDENCE_NOTE = (
    "rational independence of the symbolic entries is a declared assumption, not verified"
)


@dataclass(frozen=True)
class TropicalTorus:
    """The torus ``B(M) = R^n / (M Z^n)`` with the standard integral affine structure.

    ``M`` may hold :class:`SymbolicReal` entries (then ``symbols`` is set).  The
    ``irrational_symmetric`` flag asserts that ``M`` is symmetric and its
    ``n(n+1)/2`` upper-triangular entries are affine in the symbols with
    linearly independent linear parts, so that together with 1 they are
    rationally independent under the declared independence of the symbols.
    """

    M: tuple
    symbols: xn.SymbolSet | None = None
    irrational_symmetric: bool = False
    _det_sign: Sign = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        M = xn.matrix(self.M)
        n, k = xn.shape(M)
        if n != k or n == 0:
            raise DimensionMismatch("torus matrix must be square and non-empty")
        object.__setattr__(self, "M", M)
        s = sign_of(xn.det(M))
        if s is Sign.ZERO:
            raise InputError("torus matrix must be invertible")
        object.__setattr__(self, "_det_sign", s)
        if self.irrational_symmetric:
            self._check_irrational_symmetric()

    @classmethod
    def rational(cls, rows):
        return cls(xn.rat_matrix(rows))

    @property
    def n(self):
        return len(self.M)

    @property
    def is_rational(self):
        return not xn.is_symbolic_matrix(self.M)

    @property
    def det_sign(self) -> Sign:
        return self._det_sign

    def _check_irrational_symmetric(self):
        M, n = self.M, self.n
        if self.symbols is None or not self.symbols.independent:
            raise InputError("irrational_symmetric requires independently declared symbols")
        if not xn.mat_equal(M, xn.transpose(M)):
            raise InputError("irrational_symmetric requires a symmetric matrix")
        parts = []
        for i in range(n):
            for j in range(i, n):
                entry = SymbolicReal.lift(M[i][j], self.symbols)
                if entry.degree() != 1:
                    raise InputError(f"entry ({i},{j}) is not a non-constant affine symbolic value")
                parts.append(entry.linear_part())
        if xn.rank(parts, len(self.symbols.names)) != len(parts):
            raise InputError("upper-triangular entries are not rationally independent")

    def rational_M(self):
        if not self.is_rational:
            raise InputError("operation requires a rational torus matrix")
        return tuple(tuple(xn.to_rational(x) for x in r) for r in self.M)

    def point(self, coords) -> "TorusPoint":
        return TorusPoint(self, tuple(coords))

    def lattice_vector(self, m):
        return xn.matvec(self.M, m)

    def contains_lattice_vector(self, v) -> bool:
        return xn.lattice_solve(self.rational_M(), v) is not None

    def reduce(self, v):
        return xn.reduce_mod_lattice(self.rational_M(), xn.as_vector(v))

    def congruent(self, a, b) -> bool:
        return self.contains_lattice_vector(xn.vec_sub(xn.as_vector(a), xn.as_vector(b)))

    def to_json(self):
        out = {"n": self.n, "M": [[_entry_json(x) for x in r] for r in self.M], "symbolic": not self.is_rational}
        if self.symbols is not None:
            out["symbols"] = self.symbols.to_json()
            out["independent"] = self.symbols.independent
        if self.irrational_symmetric:
            out["irrational_symmetric"] = True
        return out

    @classmethod
    def from_json(cls, data):
        symbols = None
        if data.get("symbols"):
            symbols = xn.SymbolSet.create(data["symbols"], data.get("independent", True))
        M = tuple(tuple(xn.sym_from_json(x, symbols) for x in r) for r in data["M"])
        if "n" in data and data["n"] != len(M):
            raise DimensionMismatch("declared n does not match M")
        return cls(M, symbols, bool(data.get("irrational_symmetric", False)))


def _entry_json(x):
    if isinstance(x, SymbolicReal):
        return x.to_json()
    return xn.fmt_rational(x)


@dataclass(frozen=True)
class TorusPoint:
    """A point of a torus; rational coordinates are stored canonically reduced."""

    torus: TropicalTorus
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.torus.n:
            raise DimensionMismatch("point dimension does not match the torus")
        if self.torus.is_rational and not any(xn.is_symbolic(c) for c in self.coords):
            object.__setattr__(self, "coords", self.torus.reduce(self.coords))

    def __eq__(self, other):
        return isinstance(other, TorusPoint) and self.torus == other.torus and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)


@dataclass(frozen=True)
class ZeroCycle:
    """A finite formal sum of torus points; the torus is implicit in the points."""

    terms: tuple  # ((coords, mult), ...)

    @classmethod
    def of(cls, pairs):
        return cls(tuple((xn.as_vector(p), int(m)) for p, m in pairs if int(m) != 0))

    def degree(self):
        return sum(m for _, m in self.terms)

    def __add__(self, other):
        return ZeroCycle(self.terms + other.terms)

    def __neg__(self):
        return ZeroCycle(tuple((p, -m) for p, m in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def to_json(self):
        return [{"point": [xn.fmt_rational(c) for c in p], "mult": m} for p, m in self.terms]

    @classmethod
    def from_json(cls, data):
        return cls.of((d["point"], d["mult"]) for d in data)


def degree(cycle: ZeroCycle) -> int:
    return cycle.degree()


@dataclass(frozen=True)
class AlbClass:
    torus: TropicalTorus
    vector: tuple

    def is_zero(self):
        return all(c == 0 for c in self.vector)

    def __add__(self, other):
        return AlbClass(self.torus, self.torus.reduce(xn.vec_add(self.vector, other.vector)))

    def to_json(self):
        return [xn.fmt_rational(c) for c in self.vector]


def integration_pairing(torus: TropicalTorus, gamma, alpha):
    """Integral of the constant integral covector ``alpha`` over the cycle ``M gamma``."""
    if len(gamma) != torus.n or len(alpha) != torus.n:
        raise DimensionMismatch("pairing vectors must have length n")
    return xn._dot(alpha, torus.lattice_vector(gamma))


def albanese_of_cycle(torus: TropicalTorus, cycle: ZeroCycle) -> AlbClass:
    """``sum n_p p`` reduced modulo ``M Z^n``; requires degree zero."""
    if cycle.degree() != 0:
        raise NonzeroDegree(f"cycle has degree {cycle.degree()}")
    total = (Fraction(0),) * torus.n
    for p, m in cycle.terms:
        if len(p) != torus.n:
            raise DimensionMismatch("cycle point dimension does not match the torus")
        total = xn.vec_add(total, xn.vec_scale(m, torus.reduce(p)))
    return AlbClass(torus, torus.reduce(total))


# ---------------------------------------------------------------- polarizations


@dataclass(frozen=True)
class Polarization:
    """Integer matrix ``A`` with ``A M`` symmetric positive definite.

    The polarization map on cycles is ``c(gamma) = A^T gamma`` so that the pairing
    ``gamma_1, gamma_2 -> c(gamma_2)(M gamma_1) = gamma_2^T (A M) gamma_1`` is the
    symmetric form ``A M``.  The induced flat metric on vectors is ``A^T M^{-1}``
    and on covectors ``M A^{-T}``.
    """

    torus: TropicalTorus
    A: tuple

    def __post_init__(self):
        A = tuple(tuple(int(x) for x in r) for r in self.A)
        if xn.shape(A) != (self.torus.n, self.torus.n):
            raise DimensionMismatch("polarization matrix has the wrong size")
        object.__setattr__(self, "A", A)
        S = self.metric
        if not xn.mat_equal(S, xn.transpose(S)):
            raise InputError("A M is not symmetric")
        if not xn.is_positive_definite(S):
            raise InputError("A M is not positive definite")

    @property
    def metric(self):
        return xn.matmul(self.A, self.torus.M)

    def c(self, gamma):
        return xn.matvec(xn.transpose(self.A), gamma)

    def pairing(self, gamma1, gamma2):
        return xn._dot(self.c(gamma2), self.torus.lattice_vector(gamma1))

    def covector_gram(self):
        """Gram matrix ``P`` with ``|alpha^#|^2 = alpha^T P alpha``."""
        At_inv = xn.inverse(xn.transpose(self.A))
        return xn.matmul(self.torus.rational_M(), At_inv)

    def vector_gram(self):
        return xn.matmul(xn.transpose(self.A), xn.inverse(self.torus.rational_M()))

    def to_json(self):
        return {"torus": self.torus.to_json(), "A": [list(r) for r in self.A]}

    @classmethod
    def from_json(cls, data):
        return cls(TropicalTorus.from_json(data["torus"]), tuple(tuple(r) for r in data["A"]))


@dataclass(frozen=True)
class NoPolarizationCertificate:
    """Proof record that ``B(M)`` admits no polarization."""

    torus: TropicalTorus
    relations: tuple  # human-readable commutation relations forced on A
    commutant: tuple  # basis of the rational solution space of M A^T = A M
    conclusion: str
    indefinite_witness: dict
    assumptions: tuple

    def to_json(self):
        return {
            "kind": "NoPolarizationCertificate",
            "torus": self.torus.to_json(),
            "relations": list(self.relations),
            "commutant": [[[xn.fmt_rational(x) for x in r] for r in B] for B in self.commutant],
            "conclusion": self.conclusion,
            "indefinite_witness": self.indefinite_witness,
            "assumptions": list(self.assumptions),
        }


@dataclass(frozen=True)
class Unknown:
    reason: str

    def to_json(self):
        return {"kind": "Unknown", "reason": self.reason}


def _commutant_equations(E, n, F=None):
    """Linear equations in the n^2 entries of A (row-major) for ``E A^T = A F``.

    ``F`` defaults to ``E``.  Symmetry of ``A M`` is ``M^T A^T = A M``.
    """
    F = E if F is None else F
    rows = []
    for i in range(n):
        for j in range(n):
            # (E A^T)_{ij} = sum_k E_ik A_jk ; (A E)_{ij} = sum_k A_ik E_kj
            row = [Fraction(0)] * (n * n)
            for k in range(n):
                row[j * n + k] += E[i][k]
                row[i * n + k] -= F[k][j]
            if any(row):
                rows.append(tuple(row))
    return rows


def _symbol_coefficients(torus):
    """Split ``M = C + sum_s sigma_s M_s`` for a matrix with affine symbolic entries."""
    n, syms = torus.n, torus.symbols
    nsym = len(syms.names)
    const = [[Fraction(0)] * n for _ in range(n)]
    per = [[[Fraction(0)] * n for _ in range(n)] for _ in range(nsym)]
    for i in range(n):
        for j in range(n):
            entry = SymbolicReal.lift(torus.M[i][j], syms)
            if entry.degree() > 1:
                raise InputError("symbolic entries must be affine in the symbols")
            const[i][j] = entry.constant()
            for s, c in enumerate(entry.linear_part()):
                per[s][i][j] = c
    return const, per


def _quadratic_form(M, x):
    return xn._dot(x, xn.matvec(M, x))


def indefinite_witness(M, radius=2):
    """Integer vectors with certified positive and negative values of ``x^T M x``."""
    n = len(M)
    pos = neg = None
    vecs = sorted(
        (v for v in itertools.product(range(-radius, radius + 1), repeat=n) if any(v)),
        key=lambda v: (sum(abs(c) for c in v), [-c for c in v]),
    )
    for v in vecs:
        try:
            s = sign_of(_quadratic_form(M, v))
        except IndeterminateSign:
            continue
        if s is Sign.POSITIVE and pos is None:
            pos = v
        elif s is Sign.NEGATIVE and neg is None:
            neg = v
        if pos is not None and neg is not None:
            return pos, neg
    return None


def _definiteness(M):
    """+1 positive definite, -1 negative definite, 0 otherwise (all certified)."""
    if xn.is_positive_definite(M):
        return 1
    if xn.is_positive_definite(xn.mat_scale(-1, M)):
        return -1
    return 0


def find_polarization(torus: TropicalTorus, bound: int = 10):
    """Decide whether the torus admits a polarization.

    Irrational symmetric tori follow the commutation argument: splitting
    ``M A^T = A M`` along the independent symbols forces ``A = c I``, so a
    polarization exists iff ``M`` or ``-M`` is definite.  Rational tori search
    integer points of height at most ``bound`` in the commutant of ``M``.
    """
    n = torus.n
    if torus.irrational_symmetric:
        return _symbolic_polarization(torus)
    if not torus.is_rational:
        return Unknown("symbolic torus not flagged irrational_symmetric")
    M = torus.rational_M()
    rows = xn.integerize_rows(_commutant_equations(xn.transpose(M), n, M))
    basis = _size_reduce(xn.integer_kernel(rows, n * n))
    ident = tuple(int(i == j) for i in range(n) for j in range(n))
    candidates = [ident, tuple(-x for x in ident)]
    for A in candidates + list(_lattice_points(basis, bound)):
        if max(abs(x) for x in A) > bound:
            continue
        mat = tuple(A[i * n : (i + 1) * n] for i in range(n))
        S = xn.matmul(mat, M)
        if not xn.mat_equal(S, xn.transpose(S)):
            continue
        if xn.is_positive_definite(S):
            return Polarization(torus, mat)
    return Unknown(f"no polarization with entries bounded by {bound}")


def _size_reduce(basis):
    basis = [list(b) for b in basis]
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(len(basis)):
                if i == j:
                    continue
                bj = basis[j]
                nj = sum(x * x for x in bj)
                q = round(Fraction(sum(x * y for x, y in zip(basis[i], bj)), nj))
                if q:
                    cand = [x - q * y for x, y in zip(basis[i], bj)]
                    if sum(x * x for x in cand) < sum(x * x for x in basis[i]):
                        basis[i] = cand
                        changed = True
    return [tuple(b) for b in basis]


def _lattice_points(basis, bound):
    d = len(basis)
    if d == 0:
        return
    size = len(basis[0])
    for h in range(1, bound + 1):
        for coeffs in itertools.product(range(-h, h + 1), repeat=d):
            if max(abs(c) for c in coeffs) != h:
                continue
            yield tuple(sum(c * b[k] for c, b in zip(coeffs, basis)) for k in range(size))


def _symbolic_polarization(torus):
    n = torus.n
    const, per = _symbol_coefficients(torus)
    rows = []
    relations = []
    for s, Ms in enumerate(per):
        eqs = _commutant_equations(Ms, n)
        if eqs:
            relations.append(f"coefficient of {torus.symbols.names[s]}: M_s A^T = A M_s with M_s = {_fmt_mat(Ms)}")
        rows.extend(eqs)
    eqs = _commutant_equations(const, n)
    if eqs:
        relations.append(f"constant part: C A^T = A C with C = {_fmt_mat(const)}")
    rows.extend(eqs)
    # the symbol coefficients span all symmetric matrices, so these relations
    # are equivalent to the elementary ones below
    for i in range(n):
        relations.append(f"e_{i+1}{i+1} A^T = A e_{i+1}{i+1}")
        for j in range(i + 1, n):
            relations.append(f"(e_{i+1}{j+1} + e_{j+1}{i+1}) A^T = A (e_{i+1}{j+1} + e_{j+1}{i+1})")
    kernel = xn.nullspace(rows, n * n)
    commutant = tuple(tuple(tuple(v[i * n : (i + 1) * n]) for i in range(n)) for v in kernel)
    scalar = len(kernel) == 1 and xn.mat_equal(
        commutant[0], xn.mat_scale(commutant[0][0][0], xn.identity(n))
    )
    if not scalar:
        raise InputError("commutant is not the scalar matrices; irrational_symmetric data inconsistent")
    sign = _definiteness(torus.M)
    if sign:
        return Polarization(torus, tuple(tuple(sign * int(i == j) for j in range(n)) for i in range(n)))
    witness = indefinite_witness(torus.M)
    if witness is None:
        raise IndeterminateSign("could not certify indefiniteness; refine the enclosures")
    pos, neg = witness
    return NoPolarizationCertificate(
        torus=torus,
        relations=tuple(relations),
        commutant=commutant,
        conclusion="A is a multiple of the identity and M is indefinite, so A M is never positive definite",
        indefinite_witness={"positive": list(pos), "negative": list(neg)},
        assumptions=(INDEPENDENCE_NOTE,),
    )


def _fmt_mat(m):
    return "[" + ", ".join("[" + ", ".join(xn.fmt_rational(x) for x in r) + "]" for r in m) + "]"


@dataclass(frozen=True)
class NoCurveCertificate:
    torus: TropicalTorus
    hypotheses: dict
    statement: str
    assumptions: tuple

    def to_json(self):
        return {
            "kind": "NoCurveCertificate",
            "torus": self.torus.to_json(),
            "hypotheses": self.hypotheses,
            "statement": self.statement,
            "assumptions": list(self.assumptions),
        }


def no_curve_certificate(torus: TropicalTorus) -> NoCurveCertificate:
    """Certify that an irrational symmetric, invertible, indefinite torus has no curves."""
    if not torus.irrational_symmetric:
        raise HypothesisFailed("irrational_symmetric", "torus is not flagged irrational symmetric")
    try:
        det_sign = sign_of(xn.det(torus.M))
    except IndeterminateSign as exc:
        raise HypothesisFailed("invertible", f"indeterminate: {exc}") from exc
    if det_sign is Sign.ZERO:
        raise HypothesisFailed("invertible", "det M = 0")
    try:
        definite = _definiteness(torus.M)
    except IndeterminateSign:
        definite = 0
    if definite:
        raise HypothesisFailed("indefinite", "M is definite")
    witness = indefinite_witness(torus.M)
    if witness is None:
        raise HypothesisFailed("indefinite", "indeterminate: no certified vectors of both signs")
    pos, neg = witness
    hyps = {
        "irrational_symmetric": {"symbols": torus.symbols.to_json(), "checked": "structural"},
        "invertible": {"det_sign": str(det_sign), "det": repr(xn.det(torus.M))},
        "indefinite": {
            "positive_vector": list(pos),
            "positive_value_enclosure": [xn.fmt_rational(x) for x in SymbolicReal.lift(_quadratic_form(torus.M, pos), torus.symbols).enclosure()],
            "negative_vector": list(neg),
            "negative_value_enclosure": [xn.fmt_rational(x) for x in SymbolicReal.lift(_quadratic_form(torus.M, neg), torus.symbols).enclosure()],
        },
    }
    return NoCurveCertificate(
        torus=torus,
        hypotheses=hyps,
        statement="B(M) contains no tropical curve; CH_0(B(M)) is free on the points of B(M)",
        assumptions=(INDEPENDENCE_NOTE,),
    )
