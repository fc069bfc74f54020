"""Supermatrices over supertime and the first-order operators acting on it.

Supertime is ``(t, θ, θ̄)``; its Grassmann part is the algebra generated by
``theta`` and ``thetabar`` declared in that order.  A supermatrix of
signature ``(1|2)`` carries index 0 as the even (``t``) direction and indices
1, 2 as the odd (``θ``, ``θ̄``) ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Sequence

import sympy
from sympy.polys.domains import QQ

from .errors import NoInverse, SingularOddBlock
from .grassmann import GrassmannAlgebra, Supernumber, left_derivative
from .rings import exact_scalars, polynomial_ring

THETA = "theta"
THETABAR = "thetabar"
SUPERTIME_LABELS = (THETA, THETABAR)

# flat supertime metric: symmetric on t, antisymmetric on (θ, θ̄)
ETA = ((1, 0, 0), (0, 0, -1), (0, 1, 0))


def supertime_algebra(ring=None) -> GrassmannAlgebra:
    return GrassmannAlgebra(SUPERTIME_LABELS, ring if ring is not None else exact_scalars())


# ---------------------------------------------------------------------------
# commutative linear algebra on even entries


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def even_det(rows: Sequence[Sequence[Supernumber]], algebra: GrassmannAlgebra) -> Supernumber:
    """Leibniz determinant; entries must be mutually commuting (even)."""
    n = len(rows)
    if n == 0:
        return algebra.one
    total = algebra.zero
    for p in permutations(range(n)):
        term = algebra.scalar(_perm_sign(p))
        for i in range(n):
            term = term * rows[i][p[i]]
            if not term:
                break
        total = total + term
    return total


def even_inverse(rows, algebra: GrassmannAlgebra):
    """Adjugate inverse of a square block of even supernumbers."""
    n = len(rows)
    det = even_det(rows, algebra)
    if not det.body():
        raise SingularOddBlock("block body is singular")
    dinv = det.inverse()
    if n == 1:
        return [[dinv]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = even_det(minor, algebra)
            out[j][i] = cof * dinv if (i + j) % 2 == 0 else -(cof * dinv)
    return out


def _matmul(a, b, algebra):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = algebra.zero
            for r in range(k):
                acc = acc + a[i][r] * b[r][j]
            row.append(acc)
        out.append(row)
    return out


def _sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _neg(a):
    return [[-x for x in r] for r in a]


# ---------------------------------------------------------------------------


class SuperMatrix:
    """Grading-consistent square supermatrix with signature ``(n_even, n_odd)``."""

    def __init__(self, entries, algebra: GrassmannAlgebra, signature=(1, 2), check=True):
        self.algebra = algebra
        self.signature = tuple(signature)
        size = sum(self.signature)
        rows = [[algebra.convert(x) for x in row] for row in entries]
        if len(rows) != size or any(len(r) != size for r in rows):
            raise ValueError(f"expected a {size}x{size} array")
        self.rows = rows
        if check:
            self._check_grading()

    @property
    def size(self) -> int:
        return sum(self.signature)

    def index_parity(self, i: int) -> int:
        return 0 if i < self.signature[0] else 1

    def _check_grading(self):
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                want = self.index_parity(i) ^ self.index_parity(j)
                p = x.parity()
                if x and p != want:
                    raise ValueError(
                        f"entry ({i},{j}) must be {'odd' if want else 'even'}, got {x!r}"
                    )

    def __getitem__(self, ij) -> Supernumber:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, SuperMatrix) and self.rows == other.rows

    def __matmul__(self, other: "SuperMatrix") -> "SuperMatrix":
        return SuperMatrix(_matmul(self.rows, other.rows, self.algebra), self.algebra, self.signature)

    def __repr__(self):
        return "SuperMatrix(\n  " + "\n  ".join(repr(r) for r in self.rows) + ")"

    def blocks(self):
        m = self.signature[0]
        r = self.rows
        A = [row[:m] for row in r[:m]]
        B = [row[m:] for row in r[:m]]
        C = [row[:m] for row in r[m:]]
        D = [row[m:] for row in r[m:]]
        return A, B, C, D

    @classmethod
    def from_blocks(cls, A, B, C, D, algebra, signature):
        rows = [ra + rb for ra, rb in zip(A, B)] + [rc + rd for rc, rd in zip(C, D)]
        return cls(rows, algebra, signature)

    @classmethod
    def identity(cls, algebra, signature=(1, 2)) -> "SuperMatrix":
        n = sum(signature)
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], algebra, signature)

    def transpose_entries(self) -> "SuperMatrix":
        """Plain (ungraded) transpose of the entry array."""
        n = self.size
        return SuperMatrix([[self.rows[j][i] for j in range(n)] for i in range(n)],
                           self.algebra, self.signature)

    def odd_block_inverse(self):
        _, _, _, D = self.blocks()
        return even_inverse(D, self.algebra)

    def inverse(self) -> "SuperMatrix":
        A, B, C, D = self.blocks()
        alg = self.algebra
        Dinv = even_inverse(D, alg)
        S = _sub(A, _matmul(_matmul(B, Dinv, alg), C, alg))
        try:
            Sinv = even_inverse(S, alg)
        except SingularOddBlock:
            raise NoInverse("even Schur complement is singular") from None
        BDinv = _matmul(B, Dinv, alg)
        DinvC = _matmul(Dinv, C, alg)
        top_right = _neg(_matmul(Sinv, BDinv, alg))
        bottom_left = _neg(_matmul(DinvC, Sinv, alg))
        bottom_right = _add(Dinv, _matmul(_matmul(DinvC, Sinv, alg), BDinv, alg))
        return SuperMatrix.from_blocks(Sinv, top_right, bottom_left, bottom_right, alg, self.signature)


def superdeterminant(M: SuperMatrix) -> Supernumber:
    """sdet M = det(A − B D⁻¹ C) · det(D)⁻¹ for the grading blocks of M."""
    A, B, C, D = M.blocks()
    alg = M.algebra
    detD = even_det(D, alg)
    if not detD.body():
        raise SingularOddBlock("odd-odd block has singular body")
    Dinv = even_inverse(D, alg)
    S = _sub(A, _matmul(_matmul(B, Dinv, alg), C, alg))
    return even_det(S, alg) * detD.inverse()


def metric_from_vierbein(E: SuperMatrix, eta=ETA) -> SuperMatrix:
    """Metric g_MN built from the vierbein E^A_M and the flat metric η_AB.

    ``E`` is the array ``E[M][A] = E^A_M``: rows carry the curved index and
    columns the flat one, so it is the inverse of the ``E^M_A`` array whose
    first row is the coefficient vector of D_τ.  The graded sign is
    ``(−1)^{(1+|B|)|M|}`` with index gradings (0 for t, 1 for θ and θ̄).
    Putting the exponent on the second curved index instead does not give a
    graded-symmetric metric with the expected off-diagonal signs.
    """
    alg = E.algebra
    n = E.size
    par = E.index_parity
    rows = []
    for M in range(n):
        row = []
        for N in range(n):
            acc = alg.zero
            for A in range(n):
                left = E[M, A]
                if not left:
                    continue
                for B in range(n):
                    if not eta[A][B]:
                        continue
                    right = E[N, B]
                    if not right:
                        continue
                    sign = -1 if ((1 + par(B)) * par(M)) % 2 else 1
                    acc = acc + left * right * (sign * eta[A][B])
            row.append(acc)
        rows.append(row)
    return SuperMatrix(rows, alg, E.signature)


# ---------------------------------------------------------------------------
# functions on supertime and the operators acting on them

_SQRT2_FIELD = QQ.algebraic_field(sympy.sqrt(2), sympy.I)


def supertime_function_algebra() -> GrassmannAlgebra:
    """{θ, θ̄} algebra with coefficients polynomial in t over Q(√2, i)."""
    return supertime_algebra(polynomial_ring(("t",), _SQRT2_FIELD))


@dataclass(frozen=True)
class SupertimeFunction:
    """Polynomial in t with supernumber coefficients over {θ, θ̄}."""

    value: Supernumber

    @classmethod
    def from_expr(cls, build: Callable) -> "SupertimeFunction":
        """``build(t, theta, thetabar)`` with each argument a supernumber."""
        alg = supertime_function_algebra()
        t = alg.scalar(alg.ring.gen("t"))
        th, thb = alg.gens()
        return cls(build(t, th, thb))

    def coerce(self) -> "SupertimeFunction":
        alg = supertime_function_algebra()
        return SupertimeFunction(alg.convert(self.value))

    def __eq__(self, other):
        return isinstance(other, SupertimeFunction) and self.value == other.value

    def __add__(self, other):
        return SupertimeFunction(self.value + other.value)

    def __sub__(self, other):
        return SupertimeFunction(self.value - other.value)

    def __mul__(self, k):
        return SupertimeFunction(self.value * k)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"SupertimeFunction({self.value!r})"


def _dt(x: Supernumber) -> Supernumber:
    ring = x.algebra.ring
    return x.map_coefficients(lambda c: ring.diff(c, "t"))


def _times_t(x: Supernumber) -> Supernumber:
    return x * x.algebra.ring.gen("t")


def _d(label):
    return lambda x: left_derivative(x, label)


def _build_operators():
    inv_sqrt2 = _SQRT2_FIELD.from_sympy(1 / sympy.sqrt(2))
    half = _SQRT2_FIELD.from_sympy(sympy.Rational(1, 2))

    def th(x):
        return x.algebra.gen(THETA) * x

    def thb(x):
        return x.algebra.gen(THETABAR) * x

    dth, dthb = _d(THETA), _d(THETABAR)

    return {
        "X1": lambda f: -thb(dth(f)),
        "X2": lambda f: th(dthb(f)),
        "X3": lambda f: (thb(dthb(f)) - th(dth(f))) * (-half),
        "X4": lambda f: (thb(_dt(f)) - _times_t(dth(f))) * (-inv_sqrt2),
        "X5": lambda f: (th(_dt(f)) + _times_t(dthb(f))) * inv_sqrt2,
        "Omega_H": lambda f: -dth(f) - thb(_dt(f)),
        "Omegabar_H": lambda f: dthb(f) + th(_dt(f)),
        "d_t": _dt,
    }


OPERATORS = _build_operators()
OSP12_GENERATORS = ("X1", "X2", "X3", "X4", "X5")


def apply_operator(name: str, f: SupertimeFunction) -> SupertimeFunction:
    try:
        op = OPERATORS[name]
    except KeyError:
        raise KeyError(f"unknown operator {name!r}; expected one of {sorted(OPERATORS)}") from None
    return SupertimeFunction(op(f.coerce().value))


def anticommutator(a: str, b: str, f: SupertimeFunction) -> SupertimeFunction:
    return apply_operator(a, apply_operator(b, f)) + apply_operator(b, apply_operator(a, f))


def osp_invariant() -> SupertimeFunction:
    """F = z^A η_AB z^B = t² − 2θ̄θ."""
    return SupertimeFunction.from_expr(lambda t, th, thb: t * t - 2 * (thb * th))
