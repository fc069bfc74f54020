"""Polynomial observables on phase space and their Hamiltonian flows.

Coordinates are ordered ``φ = (q^1..q^n, p^1..p^n)`` and the symplectic
matrix is ``ω = [[0, I], [-I, 0]]``, so ``φ̇^a = ω^{ab} ∂_b H``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import sympy

from .errors import DimensionMismatch
from .integrate import StepStats, dopri45
from .rings import ExactRing, polynomial_ring, to_complex


def phase_names(n: int) -> tuple:
    if n == 1:
        return ("q", "p")
    return tuple(f"q{i}" for i in range(1, n + 1)) + tuple(f"p{i}" for i in range(1, n + 1))


def omega(n: int) -> np.ndarray:
    w = np.zeros((2 * n, 2 * n))
    w[:n, n:] = np.eye(n)
    w[n:, :n] = -np.eye(n)
    return w


def omega_entry(n: int, a: int, b: int) -> int:
    if a < n and b == a + n:
        return 1
    if a >= n and b == a - n:
        return -1
    return 0


def phase_ring(n: int) -> ExactRing:
    return polynomial_ring(phase_names(n))


class PolynomialObservable:
    """Exact polynomial in the 2n phase-space coordinates."""

    def __init__(self, poly, n: int):
        self.n = n
        self.poly = phase_ring(n).convert(poly)

    # construction -------------------------------------------------------

    @classmethod
    def from_expr(cls, expr, n: int = 1) -> "PolynomialObservable":
        """Parse a string or sympy expression in the coordinate names."""
        names = phase_names(n)
        if isinstance(expr, str):
            local = {s: sympy.Symbol(s) for s in names}
            expr = sympy.sympify(expr, locals=local)
        expr = sympy.nsimplify(sympy.sympify(expr), rational=True)
        extra = {str(s) for s in expr.free_symbols} - set(names)
        if extra:
            raise ValueError(f"unknown symbols {sorted(extra)}; coordinates are {names}")
        R = phase_ring(n).R
        return cls(R.from_expr(expr) if expr.free_symbols else R.ground_new(R.domain.from_sympy(expr)), n)

    @classmethod
    def coordinate(cls, a: int, n: int = 1) -> "PolynomialObservable":
        return cls(phase_ring(n).gens[a], n)

    @classmethod
    def constant(cls, value, n: int = 1) -> "PolynomialObservable":
        return cls(value, n)

    @property
    def names(self) -> tuple:
        return phase_names(self.n)

    # algebra --------------------------------------------------------------

    def _other(self, other):
        if isinstance(other, PolynomialObservable):
            if other.n != self.n:
                raise DimensionMismatch(f"n = {self.n} vs n = {other.n}")
            return other.poly
        return phase_ring(self.n).convert(other)

    def __add__(self, other):
        return PolynomialObservable(self.poly + self._other(other), self.n)

    __radd__ = __add__

    def __sub__(self, other):
        return PolynomialObservable(self.poly - self._other(other), self.n)

    def __rsub__(self, other):
        return PolynomialObservable(self._other(other) - self.poly, self.n)

    def __neg__(self):
        return PolynomialObservable(-self.poly, self.n)

    def __mul__(self, other):
        return PolynomialObservable(self.poly * self._other(other), self.n)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return PolynomialObservable(self.poly ** k, self.n)

    def __eq__(self, other):
        if isinstance(other, PolynomialObservable):
            return self.n == other.n and self.poly == other.poly
        return self.poly == phase_ring(self.n).convert(other)

    def __hash__(self):
        return hash((self.n, self.poly))

    def __bool__(self):
        return bool(self.poly)

    def __repr__(self):
        return f"PolynomialObservable({self.poly.as_expr()}, n={self.n})"

    def degree(self) -> int:
        return max((sum(m) for m in self.poly.monoms()), default=0) if self.poly else 0

    # derivatives ------------------------------------------------------------

    def diff(self, *indices: int) -> "PolynomialObservable":
        p = self.poly
        gens = phase_ring(self.n).gens
        for a in indices:
            p = p.diff(gens[a])
        return PolynomialObservable(p, self.n)

    def gradient(self) -> list:
        return [self.diff(a) for a in range(2 * self.n)]

    def hessian(self) -> list:
        d = 2 * self.n
        return [[self.diff(a, b) for b in range(d)] for a in range(d)]

    def third(self) -> list:
        d = 2 * self.n
        return [[[self.diff(a, b, c) for c in range(d)] for b in range(d)] for a in range(d)]

    # evaluation ---------------------------------------------------------------

    @cached_property
    def _evaluator(self):
        return compile_polynomials([self.poly])

    def __call__(self, phi):
        """Evaluate at ``phi`` of shape ``(2n,)`` or ``(2n, ...)``."""
        out = self._evaluator(np.asarray(phi))[0]
        return out


def random_polynomial(n: int, degree: int, rng, *, terms: int = 6, span: int = 5,
                      min_degree: int = 0) -> PolynomialObservable:
    """Random observable with small rational coefficients.

    ``rng`` is a :class:`random.Random`; monomials are drawn with total degree
    between ``min_degree`` and ``degree``.
    """
    from fractions import Fraction

    R = phase_ring(n).R
    gens = R.gens
    poly = R.zero
    for _ in range(terms):
        k = rng.randint(min_degree, degree)
        mono = R.one
        for _ in range(k):
            mono = mono * gens[rng.randrange(2 * n)]
        num = rng.randint(-span, span) or 1
        poly = poly + mono * R.domain.convert(Fraction(num, rng.randint(1, 3)))
    return PolynomialObservable(poly, n)


def compile_polynomials(polys: Sequence):
    """Vectorized evaluator ``X (nvars, ...) -> (len(polys), ...)``.

    All monomials of all polynomials are gathered once; evaluation is a
    product of cached coordinate powers followed by one coefficient matmul.
    """
    monoms: dict = {}
    rows = []
    for p in polys:
        row = {}
        for m, c in p.terms():
            k = monoms.setdefault(m, len(monoms))
            row[k] = to_complex(c)
        rows.append(row)
    mlist = list(monoms)
    coeffs = np.zeros((len(polys), len(mlist)), dtype=np.complex128)
    for i, row in enumerate(rows):
        for k, c in row.items():
            coeffs[i, k] = c
    real = not np.any(coeffs.imag)
    if real:
        coeffs = coeffs.real.copy()
    nvars = len(mlist[0]) if mlist else 0
    maxdeg = [max((m[v] for m in mlist), default=0) for v in range(nvars)]

    def evaluate(X):
        X = np.asarray(X)
        batch = X.shape[1:]
        dtype = np.result_type(X.dtype, coeffs.dtype, np.float64)
        if not mlist:
            return np.zeros((len(polys),) + batch, dtype=dtype)
        powers = []
        for v in range(nvars):
            pv = [np.ones(batch, dtype=dtype)]
            for _ in range(maxdeg[v]):
                pv.append(pv[-1] * X[v])
            powers.append(pv)
        M = np.empty((len(mlist),) + batch, dtype=dtype)
        for k, m in enumerate(mlist):
            val = None
            for v, e in enumerate(m):
                if e:
                    val = powers[v][e] if val is None else val * powers[v][e]
            M[k] = 1.0 if val is None else val
        return np.tensordot(coeffs, M, axes=1)

    return evaluate


def poisson_bracket(f: PolynomialObservable, g: PolynomialObservable) -> PolynomialObservable:
    """{f, g} = ∂_a f ω^{ab} ∂_b g."""
    if f.n != g.n:
        raise DimensionMismatch(f"n = {f.n} vs n = {g.n}")
    n = f.n
    out = PolynomialObservable(0, n)
    for i in range(n):
        out = out + f.diff(i) * g.diff(i + n) - f.diff(i + n) * g.diff(i)
    return out


def liouvillian_coefficients(H: PolynomialObservable) -> tuple:
    """Advection field ``ω^{ab} ∂_b H`` of the Liouvillian, one entry per ``a``."""
    n = H.n
    grad = H.gradient()
    return tuple(grad[a + n] if a < n else -grad[a - n] for a in range(2 * n))


# ---------------------------------------------------------------------------
# flows


@dataclass(frozen=True)
class PhasePoint:
    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi)
        if phi.ndim != 1 or phi.shape[0] % 2:
            raise DimensionMismatch("a phase point has an even number of coordinates")
        object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return self.phi.shape[0] // 2

    @property
    def q(self):
        return self.phi[: self.n]

    @property
    def p(self):
        return self.phi[self.n:]


@dataclass
class FlowResult:
    endpoint: PhasePoint
    jacobi: np.ndarray
    stats: StepStats = field(default_factory=StepStats)

    @property
    def accepted_steps(self) -> int:
        return self.stats.accepted

    @property
    def max_error(self) -> float:
        return self.stats.max_error


class HamiltonianSystem:
    """Compiled vector field, Hessian and third-derivative evaluators of ``H``."""

    def __init__(self, H: PolynomialObservable):
        self.H = H
        n = self.n = H.n
        d = 2 * n
        self._field = compile_polynomials([f.poly for f in liouvillian_coefficients(H)])
        hess = H.hessian()
        self._hess = compile_polynomials([hess[a][b].poly for a in range(d) for b in range(d)])
        self.omega = omega(n)

    def field(self, X):
        return self._field(X)

    def hessian(self, X):
        d = 2 * self.n
        X = np.asarray(X)
        return self._hess(X).reshape((d, d) + X.shape[1:])

    def tangent_matrix(self, X):
        """``A^a_b = ω^{ac} ∂_c ∂_b H`` at ``X``; the linearized field."""
        h = self.hessian(X)
        return np.tensordot(self.omega, h, axes=([1], [0]))

    def trajectories(self, X0, t: float, tol: float = 1e-10):
        """Flow a batch of points ``(2n, ...)`` for time ``t``."""
        X0 = np.asarray(X0, dtype=float)
        return dopri45(lambda _t, y: self.field(y), X0, 0.0, t, tol)


def _as_phi(x0) -> np.ndarray:
    if isinstance(x0, PhasePoint):
        return x0.phi
    return np.asarray(x0)


def hamilton_flow(H: PolynomialObservable, x0, t: float, tol: float = 1e-10) -> FlowResult:
    """Endpoint and Jacobi matrix ``∂φ(t)/∂φ(0)`` of the flow of ``H``."""
    phi0 = _as_phi(x0)
    d = 2 * H.n
    if phi0.shape != (d,):
        raise DimensionMismatch(f"expected {d} coordinates, got shape {phi0.shape}")
    system = HamiltonianSystem(H)

    def rhs(_t, y):
        phi = y[:d]
        J = y[d:].reshape(d, d)
        dphi = system.field(phi[:, None])[:, 0]
        A = system.tangent_matrix(phi[:, None])[..., 0]
        return np.concatenate([dphi, (A @ J).ravel()])

    y0 = np.concatenate([phi0.astype(np.result_type(phi0, float)), np.eye(d).ravel()])
    y, stats = dopri45(rhs, y0, 0.0, t, tol)
    return FlowResult(PhasePoint(y[:d]), y[d:].reshape(d, d), stats)
