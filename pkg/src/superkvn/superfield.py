"""Superfields over supertime and the identities they satisfy.

A superfield lives in the Grassmann algebra generated by ``θ, θ̄`` followed
by the ghost labels of :class:`~superkvn.extended.ExtendedSpace`.  Three
coefficient modes share the same code:

* symbolic: coefficients are polynomials in ``φ`` and ``λ`` (the extended
  ring), ghosts are the bare generators;
* path: coefficients are polynomials in ``t``, and every ghost path is a
  linear combination of the ghost generators with ``t``-polynomial weights;
* point: exact or complex scalars.

Every supernumber ``x`` splits uniquely as
``x = x00 + θ x10 + θ̄ x01 + θθ̄ x11`` with θ-free parts; this is the
ordering used by :func:`multiplet_components`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch
from .extended import ExtendedFunction, ExtendedSpace, bracket_values, build_charge
from .grassmann import (
    GrassmannAlgebra,
    Supernumber,
    berezin_integrate,
    evaluate_polynomial,
    left_derivative,
    nilpotent_exp,
    substitute,
)
from .phase_flow import PolynomialObservable, omega_entry
from .rings import exact_scalars, polynomial_ring
from .supergeometry import THETA, THETABAR

THETA_LABELS = (THETA, THETABAR)


def superfield_algebra(n: int, ring) -> GrassmannAlgebra:
    sp = ExtendedSpace(n)
    return GrassmannAlgebra(THETA_LABELS + sp.c_labels + sp.cb_labels, ring)


def path_ring():
    return polynomial_ring(("t",))


# ---------------------------------------------------------------------------
# construction


@dataclass(frozen=True)
class Superfield:
    """The 2n superphase-space components together with their constituents."""

    n: int
    algebra: GrassmannAlgebra
    phi: tuple
    lam: tuple
    c: tuple
    cb: tuple
    components: tuple

    def __getitem__(self, a: int) -> Supernumber:
        return self.components[a]

    @property
    def space(self) -> ExtendedSpace:
        return ExtendedSpace(self.n)

    @classmethod
    def symbolic(cls, n: int = 1) -> "Superfield":
        """φ, λ as ring generators and c, c̄ as the bare ghost generators."""
        sp = ExtendedSpace(n)
        alg = superfield_algebra(n, sp.ring)
        return build_superfield(
            [sp.ring.gen(x) for x in sp.phi_names],
            [sp.ring.gen(x) for x in sp.lam_names],
            [alg.gen(g) for g in sp.c_labels],
            [alg.gen(g) for g in sp.cb_labels],
            algebra=alg,
        )


def build_superfield(phi: Sequence, lam: Sequence | None = None, c: Sequence | None = None,
                     cb: Sequence | None = None, *, algebra: GrassmannAlgebra | None = None) -> Superfield:
    """Φ^a = φ^a + θ c^a + θ̄ ω^{ab} c̄_b + i θ̄θ ω^{ab} λ_b.

    ``phi`` and ``lam`` hold ring elements (or numbers); ``c`` and ``cb`` hold
    odd supernumbers free of θ, θ̄.  Missing sectors are zero.
    """
    d = len(phi)
    if d % 2:
        raise DimensionMismatch("φ needs an even number of components")
    n = d // 2
    alg = algebra or superfield_algebra(n, exact_scalars())
    ring = alg.ring
    lam = [0] * d if lam is None else list(lam)
    c = [alg.zero] * d if c is None else list(c)
    cb = [alg.zero] * d if cb is None else list(cb)
    if not (len(lam) == len(c) == len(cb) == d):
        raise DimensionMismatch("φ, λ, c and c̄ must all have 2n entries")
    phi = tuple(ring.convert(x) for x in phi)
    lam = tuple(ring.convert(x) for x in lam)
    c = tuple(alg.convert(x) for x in c)
    cb = tuple(alg.convert(x) for x in cb)
    for x in c + cb:
        if x and (x.parity() != 1 or _has_theta(x)):
            raise ValueError(f"ghost entries must be odd and θ-free, got {x!r}")
    th, thb = alg.gen(THETA), alg.gen(THETABAR)
    tt = thb * th
    comps = []
    for a in range(d):
        x = alg.scalar(phi[a]) + th * c[a]
        for b in range(d):
            w = omega_entry(n, a, b)
            if w:
                x = x + thb * cb[b] * w + tt * alg.scalar(lam[b]) * (1j * w)
        comps.append(x)
    return Superfield(n, alg, phi, lam, c, cb, tuple(comps))


def _has_theta(x: Supernumber) -> bool:
    mask = (1 << x.algebra.index(THETA)) | (1 << x.algebra.index(THETABAR))
    return any(m & mask for m in x.terms)


# ---------------------------------------------------------------------------
# composite observables


def _evaluate_at(poly, values, ring):
    return evaluate_polynomial(poly, values, ring.one, ring.convert)


def compose_observable(G: PolynomialObservable, Phi: Superfield) -> Supernumber:
    """G(Φ) by second-order Taylor expansion around φ.

    The displacement δ^a = Φ^a − φ^a carries θ or θ̄ in every term, so any
    product of three displacements vanishes and the expansion is exact.
    """
    if G.n != Phi.n:
        raise DimensionMismatch(f"observable has n = {G.n}, superfield has n = {Phi.n}")
    alg = Phi.algebra
    ring = alg.ring
    d = 2 * Phi.n
    delta = [Phi[a] - alg.scalar(Phi.phi[a]) for a in range(d)]
    out = alg.scalar(_evaluate_at(G.poly, Phi.phi, ring))
    for a in range(d):
        ga = G.diff(a)
        if not ga:
            continue
        out = out + delta[a] * _evaluate_at(ga.poly, Phi.phi, ring)
        for b in range(d):
            gab = ga.diff(b)
            if gab:
                out = out + delta[a] * delta[b] * (_evaluate_at(gab.poly, Phi.phi, ring) * ring.convert(Fraction(1, 2)))
    return out


def compose_by_substitution(G: PolynomialObservable, Phi: Superfield) -> Supernumber:
    """G(Φ) by direct polynomial evaluation at the supernumbers Φ^a."""
    return evaluate_polynomial(G.poly, list(Phi.components), Phi.algebra.one)


def multiplet_components(x: Supernumber):
    """``(x00, x10, x01, x11)`` with ``x = x00 + θx10 + θ̄x01 + θθ̄x11``."""
    alg = x.algebra
    bt, btb = 1 << alg.index(THETA), 1 << alg.index(THETABAR)
    parts = [{}, {}, {}, {}]
    for m, c in x.terms.items():
        parts[(1 if m & bt else 0) + (2 if m & btb else 0)][m] = c
    x00 = Supernumber(alg, parts[0])
    x10 = left_derivative(Supernumber(alg, parts[1]), THETA)
    x01 = left_derivative(Supernumber(alg, parts[2]), THETABAR)
    x11 = left_derivative(left_derivative(Supernumber(alg, parts[3]), THETA), THETABAR)
    return x00, x10, x01, x11


def observable_multiplet(G: PolynomialObservable, Phi: Superfield) -> dict:
    """Components of ``G(Φ) = G(φ) + θN_G + N̄_Gθ̄ − iθ̄θ𝒢``."""
    x00, x10, x01, x11 = multiplet_components(compose_observable(G, Phi))
    return {"base": x00, "N": x10, "Nbar": x01.grade_involution(), "calH": x11 * (-1j)}


def to_extended(x: Supernumber, space: ExtendedSpace) -> ExtendedFunction:
    """View a θ-free supernumber of a symbolic superfield as an extended function."""
    if _has_theta(x):
        raise ValueError("supernumber still depends on θ or θ̄")
    return ExtendedFunction(space, space.algebra.convert(x))


# ---------------------------------------------------------------------------
# θ-Heisenberg picture


def susy_conjugation(G: PolynomialObservable, theta=None, thetabar=None) -> Supernumber:
    """exp[θQ + Q̄θ̄] G(φ) exp[−θQ − Q̄θ̄] via the adjoint series.

    Under the classical dictionary a graded commutator is ``i`` times the
    extended bracket, so each term is ``ad_X^k(G)/k!`` with
    ``ad_X(Y) = i{X, Y}``.  ``theta`` and ``thetabar`` default to the
    generators; passing ``0`` switches that direction off.  The series stops
    once a term vanishes, which happens by the second order.
    """
    n = G.n
    sp = ExtendedSpace(n)
    alg = superfield_algebra(n, sp.ring)
    th = alg.gen(THETA) if theta is None else alg.convert(theta)
    thb = alg.gen(THETABAR) if thetabar is None else alg.convert(thetabar)
    Q = alg.convert(build_charge("Q", n=n).value)
    Qb = alg.convert(build_charge("Qbar", n=n).value)
    X = th * Q + Qb * thb
    term = alg.scalar(sp.ring.convert(G.poly))
    total = term
    k = 0
    while True:
        k += 1
        term = bracket_values(X, term, sp) * sp.ring.convert(1j) * sp.ring.convert(Fraction(1, k))
        if not term:
            break
        total = total + term
    return total


# ---------------------------------------------------------------------------
# superfield bracket


def superfield_bracket_check(n: int = 1) -> dict:
    """{Φ^a(θ,θ̄), Φ^b(θ′,θ̄′)} against −iω^{ab}(θ̄−θ̄′)(θ−θ′) in the doubled algebra."""
    sp = ExtendedSpace(n)
    labels = (THETA, THETABAR, "theta_p", "thetabar_p") + sp.c_labels + sp.cb_labels
    alg = GrassmannAlgebra(labels, sp.ring)
    base = Superfield.symbolic(n)

    def relabel(x, t, tb):
        return substitute(x, alg, odd={THETA: alg.gen(t), THETABAR: alg.gen(tb)})

    th, thb, thp, thbp = (alg.gen(g) for g in labels[:4])
    d = sp.dim
    results = {}
    for a in range(d):
        for b in range(d):
            lhs = bracket_values(relabel(base[a], THETA, THETABAR),
                                 relabel(base[b], "theta_p", "thetabar_p"), sp)
            rhs = (thb - thbp) * (th - thp) * (-1j * omega_entry(n, a, b))
            results[(a, b)] = lhs == rhs
    return results


# ---------------------------------------------------------------------------
# paths


def d_dt(x: Supernumber) -> Supernumber:
    ring = x.algebra.ring
    return x.map_coefficients(lambda c: ring.diff(c, "t"))


def _ring_dt(ring, c):
    return ring.diff(c, "t")


@dataclass(frozen=True)
class SuperPath:
    """A path-mode superfield on the interval ``[t0, t1]``."""

    field: Superfield
    t0: object = 0
    t1: object = 1

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def algebra(self) -> GrassmannAlgebra:
        return self.field.algebra


def random_path(n: int = 1, degree: int = 3, seed: int = 0, *, zero_ghosts: bool = False,
                zero_lambda: bool = False, t0=0, t1=1, span: int = 5) -> SuperPath:
    """Random polynomial path with small rational Gaussian coefficients."""
    if degree > 6:
        raise ValueError("path degree is capped at 6")
    rng = random.Random(seed)
    ring = path_ring()
    alg = superfield_algebra(n, ring)
    sp = ExtendedSpace(n)
    t = ring.gen("t")
    ghosts = [alg.gen(g) for g in sp.c_labels + sp.cb_labels]

    def num():
        return Fraction(rng.randint(-span, span), rng.randint(1, 3))

    def poly():
        return sum((ring.convert(num()) * t ** k for k in range(degree + 1)), ring.zero)

    def ghost_path():
        if zero_ghosts:
            return alg.zero
        return sum((g * poly() for g in ghosts), alg.zero)

    d = 2 * n
    phi = [poly() for _ in range(d)]
    lam = [ring.zero if zero_lambda else poly() for _ in range(d)]
    c = [ghost_path() for _ in range(d)]
    cb = [ghost_path() for _ in range(d)]
    return SuperPath(build_superfield(phi, lam, c, cb, algebra=alg), t0, t1)


def _lagrangian(H: PolynomialObservable, Phi: Superfield) -> Supernumber:
    """L(Φ) = Σ_i P_i Q̇_i − H(Φ)."""
    n = Phi.n
    out = -compose_observable(H, Phi)
    for i in range(n):
        out = out + Phi[i + n] * d_dt(Phi[i])
    return out


def cpi_lagrangian(H: PolynomialObservable, Phi: Superfield) -> Supernumber:
    """ℒ = λ_aφ̇^a + ic̄_aċ^a − λ_aω^{ab}∂_bH − ic̄_aω^{ad}∂_d∂_bH c^b along a path."""
    alg = Phi.algebra
    ring = alg.ring
    n = Phi.n
    d = 2 * n
    out = alg.zero
    grad = H.gradient()
    hess = H.hessian()
    for a in range(d):
        out = out + alg.scalar(Phi.lam[a] * _ring_dt(ring, Phi.phi[a]))
        out = out + Phi.cb[a] * d_dt(Phi.c[a]) * 1j
        for b in range(d):
            w = omega_entry(n, a, b)
            if not w:
                continue
            out = out - alg.scalar(Phi.lam[a] * _evaluate_at(grad[b].poly, Phi.phi, ring)) * w
            for e in range(d):
                h = hess[b][e]
                if h:
                    out = out - Phi.cb[a] * Phi.c[e] * (_evaluate_at(h.poly, Phi.phi, ring) * (1j * w))
    return out


def boundary_term(Phi: Superfield) -> Supernumber:
    """B = λ_{p_i} p_i + i c̄_{p_i} c^{p_i}; ℒ and i∫dθdθ̄ L(Φ) differ by dB/dt."""
    alg = Phi.algebra
    n = Phi.n
    out = alg.zero
    for i in range(n):
        out = out + alg.scalar(Phi.lam[n + i] * Phi.phi[n + i]) + Phi.cb[n + i] * Phi.c[n + i] * 1j
    return out


@dataclass
class IdentityReport:
    passed: bool
    residual: Supernumber
    lhs: Supernumber
    rhs: Supernumber


def lagrangian_identity_check(H: PolynomialObservable, path: SuperPath) -> IdentityReport:
    """i∫dθdθ̄ L(Φ) = ℒ − dB/dt as an exact identity of t-polynomials."""
    Phi = path.field
    lhs = berezin_integrate(_lagrangian(H, Phi), THETA_LABELS) * 1j
    rhs = cpi_lagrangian(H, Phi) - d_dt(boundary_term(Phi))
    residual = lhs - rhs
    return IdentityReport(not residual, residual, lhs, rhs)


def integrate_interval(x: Supernumber, t0, t1) -> Supernumber:
    """∫_{t0}^{t1} dt of every coefficient (exact antiderivative)."""
    ring = x.algebra.ring
    a, b = ring.convert(t0), ring.convert(t1)
    t = ring.gen("t")

    def integ(c):
        anti = ring.zero
        for (k,), v in c.terms():
            anti = anti + ring.convert(Fraction(1, k + 1)) * v * t ** (k + 1)
        return anti.compose(t, b) - anti.compose(t, a)

    return x.map_coefficients(integ)


def at_time(x: Supernumber, t) -> Supernumber:
    ring = x.algebra.ring
    v = ring.convert(t)
    gen = ring.gen("t")
    return x.map_coefficients(lambda c: c.compose(gen, v))


@dataclass
class SuperActionExpansion:
    """``S[Φ] = base + θ𝒯 + θ̄𝒱 + iθθ̄·top``, each part θ-free."""

    action: Supernumber
    base: Supernumber
    theta_component: Supernumber
    thetabar_component: Supernumber
    top_component: Supernumber
    cpi_action: Supernumber
    surface: Supernumber

    def reassemble(self) -> Supernumber:
        alg = self.action.algebra
        th, thb = alg.gen(THETA), alg.gen(THETABAR)
        return (self.base + th * self.theta_component + thb * self.thetabar_component
                + th * thb * self.top_component * 1j)

    def checks(self) -> dict:
        return {
            "reassembly": self.reassemble() == self.action,
            "top_is_cpi_plus_surface": self.top_component == self.cpi_action + self.surface,
        }


def action_multiplet_expansion(H: PolynomialObservable, path: SuperPath, interval=None) -> SuperActionExpansion:
    """Expand S[Φ] = ∫dt L(Φ) over the interval in θ, θ̄.

    The top component equals ∫dt ℒ plus the surface term −[B]_{t0}^{t1}.
    """
    t0, t1 = interval if interval is not None else (path.t0, path.t1)
    Phi = path.field
    S = integrate_interval(_lagrangian(H, Phi), t0, t1)
    x00, x10, x01, x11 = multiplet_components(S)
    top = x11 * (-1j)
    B = boundary_term(Phi)
    surface = -(at_time(B, t1) - at_time(B, t0))
    cpi = integrate_interval(cpi_lagrangian(H, Phi), t0, t1)
    return SuperActionExpansion(S, x00, x10, x01, top, cpi, surface)


def base_action(H: PolynomialObservable, path: SuperPath, interval=None) -> Supernumber:
    """∫dt L(φ) on the body path, computed without superfields."""
    t0, t1 = interval if interval is not None else (path.t0, path.t1)
    Phi = path.field
    alg = Phi.algebra
    ring = alg.ring
    n = Phi.n
    L = -_evaluate_at(H.poly, Phi.phi, ring)
    for i in range(n):
        L = L + Phi.phi[n + i] * _ring_dt(ring, Phi.phi[i])
    return integrate_interval(alg.scalar(L), t0, t1)


# ---------------------------------------------------------------------------
# boundary factors of the mixed-basis transform


@dataclass(frozen=True)
class EndpointData:
    """p, λ_p at both ends (exact numbers); the ghosts are generators."""

    p: tuple
    lam_p: tuple
    p0: tuple
    lam_p0: tuple

    @property
    def n(self) -> int:
        return len(self.p)

    @classmethod
    def random(cls, n: int = 1, seed: int = 0, zero_bosons: bool = False) -> "EndpointData":
        rng = random.Random(seed)

        def num():
            if zero_bosons:
                return 0
            return Fraction(rng.randint(-9, 9), rng.randint(1, 4))

        return cls(*(tuple(num() for _ in range(n)) for _ in range(4)))


def endpoint_algebra(n: int) -> GrassmannAlgebra:
    labels = []
    for i in range(n):
        labels += [f"c_p{i}", f"cb_p{i}", f"c_p{i}_0", f"cb_p{i}_0"]
    return GrassmannAlgebra(labels, exact_scalars())


class _ExpFactor:
    """exp(body + soul) kept as an exact body exponent and an exact soul series."""

    def __init__(self, exponent: Supernumber):
        self.body = exponent.body()
        self.soul = nilpotent_exp(exponent.soul())

    def __mul__(self, other):
        out = _ExpFactor.__new__(_ExpFactor)
        out.body = self.body + other.body  # even exponents commute
        out.soul = self.soul * other.soul
        return out


def surface_terms(data: EndpointData) -> Supernumber:
    """(s.t.) = iλ_p p − iλ_{p0} p0 − c̄_p c^p + c̄_{p0} c^{p0}, summed over i."""
    alg = endpoint_algebra(data.n)
    C = alg.ring.convert
    i_ = C(1j)
    x = alg.zero
    for i in range(data.n):
        c, cb = alg.gen(f"c_p{i}"), alg.gen(f"cb_p{i}")
        c0, cb0 = alg.gen(f"c_p{i}_0"), alg.gen(f"cb_p{i}_0")
        x = x + alg.scalar(i_ * C(data.lam_p[i]) * C(data.p[i]) - i_ * C(data.lam_p0[i]) * C(data.p0[i]))
        x = x - cb * c + cb0 * c0
    return x


def surface_term_cancellation(data: EndpointData) -> Supernumber:
    """exp[(s.t.)]·e^{−iλ_pp}e^{c̄_pc^p}e^{iλ_{p0}p0}e^{−c̄_{p0}c^{p0}}.

    Every factor is even, so body exponents are summed exactly and soul
    factors multiplied as terminating series.  Returns the product, which is
    exactly 1 when the mixed-basis factors absorb the surface terms; a
    nonzero leftover body exponent is reported through ``ValueError`` since
    an exact ring cannot exponentiate it.
    """
    alg = endpoint_algebra(data.n)
    C = alg.ring.convert
    i_ = C(1j)
    total = _ExpFactor(surface_terms(data))
    for i in range(data.n):
        c, cb = alg.gen(f"c_p{i}"), alg.gen(f"cb_p{i}")
        c0, cb0 = alg.gen(f"c_p{i}_0"), alg.gen(f"cb_p{i}_0")
        total = total * _ExpFactor(alg.scalar(-i_ * C(data.lam_p[i]) * C(data.p[i])))
        total = total * _ExpFactor(cb * c)
        total = total * _ExpFactor(alg.scalar(i_ * C(data.lam_p0[i]) * C(data.p0[i])))
        total = total * _ExpFactor(-(cb0 * c0))
    if total.body:
        raise ValueError(f"boundary factors leave a body exponent {total.body}")
    return total.soul


# ---------------------------------------------------------------------------
# dequantization in configuration space


def configurational_superfield(path: SuperPath) -> list:
    """Q_i = q_i + θc^{q_i} + θ̄c̄_{p_i} + iθ̄θλ_{p_i} from a phase-space path."""
    return [path.field[i] for i in range(path.n)]


def theta_shrink(x: Supernumber) -> Supernumber:
    """Send θ, θ̄ → 0."""
    alg = x.algebra
    return substitute(x, alg, odd={THETA: alg.zero, THETABAR: alg.zero})


@dataclass
class DequantizedWeight:
    hbar: object
    quantum_exponent: Supernumber
    classical_integrand: Supernumber
    classical_exponent: Supernumber
    expected: Supernumber
    shrunk_fields: list
    body_fields: list

    def checks(self) -> dict:
        return {
            "matches_cpi": self.classical_integrand == self.expected,
            "shrink_recovers_q": all(a == b for a, b in zip(self.shrunk_fields, self.body_fields)),
        }


def _config_lagrangian(V: PolynomialObservable, fields: list, alg) -> Supernumber:
    """L = ½ Σ q̇_i² − V(q) evaluated at (super)numbers ``fields``."""
    out = -evaluate_polynomial(V.poly, list(fields) + [alg.zero] * len(fields), alg.one)
    half = Fraction(1, 2)
    for x in fields:
        dx = d_dt(x)
        out = out + dx * dx * half
    return out


def dequantize_action(V: PolynomialObservable, path: SuperPath, hbar=1) -> DequantizedWeight:
    """Apply φ → Φ and ∫dτ → iħ∫dτdθdθ̄ to the weight (i/ħ)∫dτ(½q̇² − V(q)).

    ``V`` is a polynomial in the position coordinates only.  The result's
    integrand is compared with ℒ restricted to ``p = q̇``, ``c^p = ċ^q``, minus
    the total derivative of ``λ_p q̇ + i c̄_p ċ^q``.
    """
    n = path.n
    if any(V.diff(n + i) for i in range(n)):
        raise ValueError("the potential may depend on positions only")
    Phi = path.field
    alg = Phi.algebra
    ring = alg.ring
    hb = ring.convert(hbar)
    inv_hb = ring.inverse(hb)
    Q = configurational_superfield(path)
    q = [alg.scalar(Phi.phi[i]) for i in range(n)]
    quantum = _config_lagrangian(V, q, alg) * (1j * inv_hb)
    # rule A and rule B together: (i/ħ) · iħ ∫dθdθ̄ L(Q)
    classical = berezin_integrate(_config_lagrangian(V, Q, alg), THETA_LABELS) * (1j * inv_hb * 1j * hb)
    # oracle: restrict the phase-space ℒ of H = p²/2 + V to the configurational slice
    H = V + sum((PolynomialObservable.coordinate(n + i, n) ** 2 * Fraction(1, 2) for i in range(n)),
                PolynomialObservable(0, n))
    sliced_phi = [Phi.phi[i] for i in range(n)] + [_ring_dt(ring, Phi.phi[i]) for i in range(n)]
    sliced_c = [Phi.c[i] for i in range(n)] + [d_dt(Phi.c[i]) for i in range(n)]
    sliced = build_superfield(sliced_phi, Phi.lam, sliced_c, Phi.cb, algebra=alg)
    total = alg.zero
    for i in range(n):
        total = total + alg.scalar(Phi.lam[n + i] * sliced_phi[n + i]) + Phi.cb[n + i] * sliced_c[n + i] * 1j
    expected = (cpi_lagrangian(H, sliced) - d_dt(total)) * 1j
    return DequantizedWeight(
        hbar=hbar,
        quantum_exponent=quantum,
        classical_integrand=classical,
        classical_exponent=integrate_interval(classical, path.t0, path.t1),
        expected=expected,
        shrunk_fields=[theta_shrink(x) for x in Q],
        body_fields=q,
    )
