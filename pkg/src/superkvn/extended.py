"""Extended phase space ``(φ^a, λ_a, c^a, c̄_a)`` and its graded brackets.

Functions on the extended space are supernumbers over the ghosts
``c^1..c^{2n}, c̄_1..c̄_{2n}`` (declared in that order) whose coefficients are
exact polynomials in ``φ`` and ``λ``.

Bracket convention.  With ``∂⃖`` a right and ``∂⃗`` a left derivative,

    {A, B} = ∂_{φ^a}A ∂_{λ_a}B − ∂_{λ_a}A ∂_{φ^a}B
             − i (A ∂⃖_{c̄_a} ∂⃗_{c^a} B + A ∂⃖_{c^a} ∂⃗_{c̄_a} B).

This reproduces the fundamental brackets ``{φ^a, λ_b} = δ^a_b`` and
``{c̄_b, c^a} = {c^a, c̄_b} = −iδ^a_b``, and every line of the extended
equations of motion reads ``Ż = {Z, ℋ}`` with a plus sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .grassmann import GrassmannAlgebra, Supernumber, left_derivative, right_derivative, substitute
from .integrate import StepStats, dopri45
from .phase_flow import (
    HamiltonianSystem,
    PhasePoint,
    PolynomialObservable,
    compile_polynomials,
    omega_entry,
    phase_names,
)
from .rings import COMPLEX, polynomial_ring


class ExtendedSpace:
    """Coordinates, ring and ghost algebra of the 8n-dimensional space.

    One instance exists per ``n``, so spaces can be compared by identity.
    """

    _instances: dict = {}

    def __new__(cls, n: int):
        inst = cls._instances.get(n)
        if inst is None:
            inst = super().__new__(cls)
            inst._setup(n)
            cls._instances[n] = inst
        return inst

    def _setup(self, n: int):
        self.n = n
        sfx = phase_names(n)
        self.phi_names = sfx
        self.lam_names = tuple(f"lam_{s}" for s in sfx)
        self.c_labels = tuple(f"c_{s}" for s in sfx)
        self.cb_labels = tuple(f"cb_{s}" for s in sfx)
        self.ring = polynomial_ring(self.phi_names + self.lam_names)
        self.algebra = GrassmannAlgebra(self.c_labels + self.cb_labels, self.ring)
        self.numeric_algebra = GrassmannAlgebra(self.c_labels + self.cb_labels, COMPLEX)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def __repr__(self):
        return f"ExtendedSpace(n={self.n})"

    # coordinates as functions ------------------------------------------

    def _wrap(self, value) -> "ExtendedFunction":
        return ExtendedFunction(self, self.algebra.convert(value))

    def phi(self, a: int) -> "ExtendedFunction":
        return self._wrap(self.algebra.scalar(self.ring.gen(self.phi_names[a])))

    def lam(self, a: int) -> "ExtendedFunction":
        return self._wrap(self.algebra.scalar(self.ring.gen(self.lam_names[a])))

    def c(self, a: int) -> "ExtendedFunction":
        return self._wrap(self.algebra.gen(self.c_labels[a]))

    def cb(self, a: int) -> "ExtendedFunction":
        return self._wrap(self.algebra.gen(self.cb_labels[a]))

    def constant(self, value) -> "ExtendedFunction":
        return self._wrap(value)

    def lift(self, f: PolynomialObservable) -> "ExtendedFunction":
        if f.n != self.n:
            raise DimensionMismatch(f"observable has n = {f.n}, space has n = {self.n}")
        return self._wrap(self.algebra.scalar(self.ring.convert(f.poly)))

    def coordinates(self):
        """All 8n coordinates as ``(kind, index, function)`` triples."""
        out = []
        for kind, make in (("phi", self.phi), ("c", self.c), ("cb", self.cb), ("lam", self.lam)):
            for a in range(self.dim):
                out.append((kind, a, make(a)))
        return out


class ExtendedFunction:
    """Function on the extended phase space."""

    __slots__ = ("space", "value")

    def __init__(self, space: ExtendedSpace, value: Supernumber):
        self.space = space
        self.value = value

    def _v(self, other):
        if isinstance(other, ExtendedFunction):
            if other.space is not self.space:
                raise DimensionMismatch(f"{other.space} vs {self.space}")
            return other.value
        return self.space.algebra.convert(other)

    def __add__(self, other):
        return ExtendedFunction(self.space, self.value + self._v(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ExtendedFunction(self.space, self.value - self._v(other))

    def __rsub__(self, other):
        return ExtendedFunction(self.space, self._v(other) - self.value)

    def __neg__(self):
        return ExtendedFunction(self.space, -self.value)

    def __mul__(self, other):
        if isinstance(other, ExtendedFunction):
            return ExtendedFunction(self.space, self.value * self._v(other))
        return ExtendedFunction(self.space, self.value * other)

    def __rmul__(self, other):
        return ExtendedFunction(self.space, self._v(other) * self.value)

    def __eq__(self, other):
        if isinstance(other, ExtendedFunction):
            return self.space is other.space and self.value == other.value
        return self.value == self._v(other)

    def __hash__(self):
        return hash(self.value)

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"ExtendedFunction({self.value!r})"

    def ghost_degree(self) -> int:
        return self.value.max_degree()

    def parity(self):
        return self.value.parity()

    def d_phi(self, a: int) -> "ExtendedFunction":
        return self._diff_even(self.space.phi_names[a])

    def d_lam(self, a: int) -> "ExtendedFunction":
        return self._diff_even(self.space.lam_names[a])

    def _diff_even(self, name):
        ring = self.space.ring
        return ExtendedFunction(self.space, self.value.map_coefficients(lambda c: ring.diff(c, name)))

    def evaluate(self, phi, lam) -> Supernumber:
        """Numeric coefficients at ``(φ, λ)``; ghosts stay symbolic."""
        return evaluate_extended(self, phi, lam)


def _check_same(A: ExtendedFunction, B: ExtendedFunction) -> ExtendedSpace:
    if A.space is not B.space:
        raise DimensionMismatch(f"{A.space} vs {B.space}")
    return A.space


def extended_poisson_bracket(A: ExtendedFunction, B: ExtendedFunction) -> ExtendedFunction:
    sp = _check_same(A, B)
    return ExtendedFunction(sp, bracket_values(A.value, B.value, sp))


def bracket_values(A: Supernumber, B: Supernumber, space: ExtendedSpace) -> Supernumber:
    """The extended bracket on raw supernumbers.

    The algebra may carry odd generators besides the ghosts (θ, θ̄ and
    primed copies); those behave as Grassmann constants.  Its ring must
    contain the φ and λ names of ``space``.
    """
    if A.algebra != B.algebra:
        raise DimensionMismatch(f"{A.algebra} vs {B.algebra}")
    ring = A.algebra.ring

    def d_even(x, name):
        return x.map_coefficients(lambda c: ring.diff(c, name))

    out = A.algebra.zero
    for a in range(space.dim):
        f, l = space.phi_names[a], space.lam_names[a]
        out = out + d_even(A, f) * d_even(B, l) - d_even(A, l) * d_even(B, f)
    ghost = A.algebra.zero
    for a in range(space.dim):
        c, cb = space.c_labels[a], space.cb_labels[a]
        ra = right_derivative(A, cb)
        if ra:
            ghost = ghost + ra * left_derivative(B, c)
        ra = right_derivative(A, c)
        if ra:
            ghost = ghost + ra * left_derivative(B, cb)
    return out + ghost * (-1j)


# ---------------------------------------------------------------------------
# superhamiltonian and charges


def build_superhamiltonian(H: PolynomialObservable) -> ExtendedFunction:
    """ℋ = λ_a ω^{ab} ∂_b H + i c̄_a ω^{ad} ∂_d ∂_b H c^b."""
    sp = ExtendedSpace(H.n)
    d = sp.dim
    grad = H.gradient()
    hess = H.hessian()
    out = sp.constant(0)
    for a in range(d):
        for b in range(d):
            w = omega_entry(H.n, a, b)
            if w:
                out = out + sp.lam(a) * sp.lift(grad[b]) * w
    for a in range(d):
        for dd in range(d):
            w = omega_entry(H.n, a, dd)
            if not w:
                continue
            for b in range(d):
                h = hess[dd][b]
                if h:
                    out = out + sp.cb(a) * sp.lift(h) * sp.c(b) * (1j * w)
    return out


CHARGES = ("Q", "Qbar", "Q_H", "Qbar_H", "N", "Nbar")
_NEEDS_H = {"Q_H", "Qbar_H", "N", "Nbar"}


def build_charge(name: str, H: PolynomialObservable | None = None, n: int | None = None) -> ExtendedFunction:
    """Q = ic^aλ_a, Q̄ = ic̄_aω^{ab}λ_b, N = c^a∂_aH, N̄ = c̄_aω^{ab}∂_bH,
    Q_H = Q − N, Q̄_H = Q̄ + N̄."""
    if name not in CHARGES:
        raise KeyError(f"unknown charge {name!r}; expected one of {CHARGES}")
    if name in _NEEDS_H and H is None:
        raise ValueError(f"charge {name} depends on the Hamiltonian")
    if H is not None:
        n = H.n
    if n is None:
        n = 1
    sp = ExtendedSpace(n)
    d = sp.dim

    def q():
        return sum((sp.c(a) * sp.lam(a) * 1j for a in range(d)), sp.constant(0))

    def qbar():
        out = sp.constant(0)
        for a in range(d):
            for b in range(d):
                w = omega_entry(n, a, b)
                if w:
                    out = out + sp.cb(a) * sp.lam(b) * (1j * w)
        return out

    def big_n():
        grad = H.gradient()
        return sum((sp.c(a) * sp.lift(grad[a]) for a in range(d)), sp.constant(0))

    def big_nbar():
        grad = H.gradient()
        out = sp.constant(0)
        for a in range(d):
            for b in range(d):
                w = omega_entry(n, a, b)
                if w:
                    out = out + sp.cb(a) * sp.lift(grad[b]) * w
        return out

    return {
        "Q": q,
        "Qbar": qbar,
        "N": big_n,
        "Nbar": big_nbar,
        "Q_H": lambda: q() - big_n(),
        "Qbar_H": lambda: qbar() + big_nbar(),
    }[name]()


def equation_of_motion_rhs(H: PolynomialObservable, kind: str, index: int) -> ExtendedFunction:
    """Right-hand side of one line of the extended equations of motion,
    written out directly (not through the bracket)."""
    sp = ExtendedSpace(H.n)
    d, n = sp.dim, H.n
    grad, hess = H.gradient(), H.hessian()
    out = sp.constant(0)
    if kind == "phi":
        for b in range(d):
            w = omega_entry(n, index, b)
            if w:
                out = out + sp.lift(grad[b]) * w
    elif kind == "c":
        for dd in range(d):
            w = omega_entry(n, index, dd)
            if w:
                for b in range(d):
                    out = out + sp.lift(hess[dd][b]) * sp.c(b) * w
    elif kind == "cb":
        for a in range(d):
            for dd in range(d):
                w = omega_entry(n, a, dd)
                if w:
                    out = out - sp.cb(a) * sp.lift(hess[dd][index]) * w
    elif kind == "lam":
        third = H.third()
        for a in range(d):
            for dd in range(d):
                w = omega_entry(n, a, dd)
                if not w:
                    continue
                out = out - sp.lift(hess[dd][index]) * sp.lam(a) * w
                for f in range(d):
                    t = third[dd][f][index]
                    if t:
                        out = out - sp.cb(a) * sp.lift(t) * sp.c(f) * (1j * w)
    else:
        raise KeyError(kind)
    return out


# ---------------------------------------------------------------------------
# evaluation and flows


def evaluate_extended(F: ExtendedFunction, phi, lam, ghosts: dict | None = None) -> Supernumber:
    """Substitute numbers (or even supernumbers) for ``φ`` and ``λ``.

    The result lives in the ghost algebra with complex coefficients.  Ghost
    generators may be replaced through ``ghosts`` (label -> supernumber).
    """
    sp = F.space
    target = sp.numeric_algebra
    even = {}
    for name, v in zip(sp.phi_names, np.ravel(phi) if not isinstance(phi, (list, tuple)) else phi):
        even[name] = v if isinstance(v, Supernumber) else complex(v)
    for name, v in zip(sp.lam_names, np.ravel(lam) if not isinstance(lam, (list, tuple)) else lam):
        even[name] = v if isinstance(v, Supernumber) else complex(v)
    return substitute(F.value, target, even=even, odd=ghosts)


@dataclass(frozen=True)
class ExtendedPoint:
    phi: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi)
        lam = np.asarray(self.lam)
        if phi.shape != lam.shape or phi.ndim != 1 or phi.shape[0] % 2:
            raise DimensionMismatch("φ and λ must both have 2n entries")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.phi.shape[0] // 2


@dataclass
class ExtendedFlowResult:
    """State at time t, expressed through transports of the initial data.

    ``c^a(t) = J^a_h c^h(0)``, ``c̄_b(t) = c̄_g(0) K^g_b`` and
    ``λ_b(t) = λ_a(0) K^a_b − i c̄_g(0) G_b^{gh} c^h(0)``.
    """

    phi: np.ndarray
    lam_body: np.ndarray
    J: np.ndarray
    K: np.ndarray
    G: np.ndarray
    stats: StepStats = field(default_factory=StepStats)

    @property
    def endpoint(self) -> PhasePoint:
        return PhasePoint(self.phi)

    def ghost_state(self, space: ExtendedSpace):
        """``(c(t), c̄(t), λ(t))`` as supernumbers in the initial ghosts."""
        alg = space.numeric_algebra
        d = space.dim
        c0 = [alg.gen(g) for g in space.c_labels]
        cb0 = [alg.gen(g) for g in space.cb_labels]
        c = [sum((c0[h] * complex(self.J[a, h]) for h in range(d)), alg.zero) for a in range(d)]
        cb = [sum((cb0[g] * complex(self.K[g, b]) for g in range(d)), alg.zero) for b in range(d)]
        lam = []
        for b in range(d):
            x = alg.scalar(complex(self.lam_body[b]))
            for g in range(d):
                for h in range(d):
                    v = self.G[b, g, h]
                    if v:
                        x = x + cb0[g] * c0[h] * (-1j * complex(v))
            lam.append(x)
        return c, cb, lam


class _ExtendedSystem:
    def __init__(self, H: PolynomialObservable):
        self.base = HamiltonianSystem(H)
        d = self.d = 2 * H.n
        third = H.third()
        self._third = compile_polynomials([third[a][b][c].poly for a in range(d)
                                           for b in range(d) for c in range(d)])
        self.omega = self.base.omega

    def T(self, phi):
        """``T^a_{eb} = ω^{ad} ∂_d ∂_e ∂_b H`` at a single point."""
        d = self.d
        t3 = self._third(phi[:, None])[:, 0].reshape(d, d, d)
        return np.tensordot(self.omega, t3, axes=([1], [0]))

    def rhs(self, y):
        d = self.d
        o = 0
        phi = y[o:o + d]; o += d
        J = y[o:o + d * d].reshape(d, d); o += d * d
        K = y[o:o + d * d].reshape(d, d); o += d * d
        lam = y[o:o + d]; o += d
        G = y[o:].reshape(d, d, d)
        M = self.base.tangent_matrix(phi[:, None])[..., 0]
        T = self.T(phi)
        dphi = self.base.field(phi[:, None])[:, 0]
        S = np.einsum("ga,aeb,eh->bgh", K, T, J)
        dG = -np.einsum("agh,ab->bgh", G, M) + S
        return np.concatenate([dphi, (M @ J).ravel(), (-K @ M).ravel(), -lam @ M, dG.ravel()])


def extended_flow(H: PolynomialObservable, x0: ExtendedPoint, t: float, tol: float = 1e-10) -> ExtendedFlowResult:
    """Integrate all four lines of the extended equations of motion."""
    if not isinstance(x0, ExtendedPoint):
        x0 = ExtendedPoint(*x0)
    d = 2 * H.n
    if x0.phi.shape[0] != d:
        raise DimensionMismatch(f"expected 2n = {d} coordinates")
    system = _ExtendedSystem(H)
    eye = np.eye(d).ravel()
    y0 = np.concatenate([x0.phi.astype(complex), eye, eye, x0.lam.astype(complex),
                         np.zeros(d ** 3)])
    if not np.any(np.iscomplex(x0.phi)) and not np.any(np.iscomplex(x0.lam)):
        y0 = y0.real
    y, stats = dopri45(lambda _t, s: system.rhs(s), y0, 0.0, t, tol)
    o = 0
    phi = y[o:o + d]; o += d
    J = y[o:o + d * d].reshape(d, d); o += d * d
    K = y[o:o + d * d].reshape(d, d); o += d * d
    lam = y[o:o + d]; o += d
    G = y[o:].reshape(d, d, d)
    return ExtendedFlowResult(phi, lam, J, K, G, stats)


def evaluate_along_flow(F: ExtendedFunction, result: ExtendedFlowResult) -> Supernumber:
    """``F`` at the flowed extended point, in terms of the initial ghosts."""
    sp = F.space
    c, cb, lam = result.ghost_state(sp)
    ghosts = dict(zip(sp.c_labels, c))
    ghosts.update(zip(sp.cb_labels, cb))
    return evaluate_extended(F, list(result.phi), lam, ghosts)


def flowed_coordinate(kind: str, index: int, result: ExtendedFlowResult, space: ExtendedSpace) -> Supernumber:
    c, cb, lam = result.ghost_state(space)
    alg = space.numeric_algebra
    if kind == "phi":
        return alg.scalar(complex(result.phi[index]))
    return {"c": c, "cb": cb, "lam": lam}[kind][index]


def _max_abs(x: Supernumber) -> float:
    return max((abs(v) for v in x.terms.values()), default=0.0)


def equations_of_motion_check(H: PolynomialObservable, x0: ExtendedPoint, t: float,
                              h: float = 1e-3, tol: float = 1e-12) -> dict:
    """Compare each line of the equations of motion three ways.

    For every coordinate ``Z``: the bracket ``{Z, ℋ}`` against the line
    written out by hand (exact, reported as the sign relating them), and the
    bracket evaluated along the flow against a central finite difference of
    the flow itself (numeric residual).
    """
    sp = ExtendedSpace(H.n)
    Hs = build_superhamiltonian(H)
    # fourth-order central stencil
    stencil = [(-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)]
    flows = [(extended_flow(H, x0, t + k * h, tol), w / h) for k, w in stencil]
    here = extended_flow(H, x0, t, tol)
    report = {}
    for kind, a, Z in sp.coordinates():
        bracket = extended_poisson_bracket(Z, Hs)
        line = equation_of_motion_rhs(H, kind, a)
        if bracket == line:
            sign = 1
        elif bracket == -line:
            sign = -1
        else:
            sign = 0
        fd = sum((flowed_coordinate(kind, a, r, sp) * w for r, w in flows), sp.numeric_algebra.zero)
        along = evaluate_along_flow(bracket, here)
        report[(kind, a)] = {"sign": sign, "residual": _max_abs(fd - along)}
    return report
