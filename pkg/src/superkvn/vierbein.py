"""Vierbeins on supertime that turn the reparametrization-invariant action
into the classical or the quantum path-integral weight.

The vierbein array ``E^M_A`` is laid out as

    [[a, α, β],
     [γ, b, c],
     [δ, d, e]]

with rows labelled by the flat index, so its first row is the coefficient
vector of ``D_τ = a∂_τ + α∂_θ + β∂_θ̄``.  Even entries are written
``x = x_B + x_S θ̄θ`` and odd ones ``γ = γ_θ θ + γ_θ̄ θ̄``.  The density
``E = sdet(E^A_M)`` is the reciprocal of ``sdet(E^M_A)``.

All solves run in exact rational arithmetic so that a violated constraint
never hides behind roundoff.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import NoSolutionBranch, RegulatorRequired
from .grassmann import Supernumber, berezin_integrate, evaluate_polynomial, left_derivative
from .phase_flow import PolynomialObservable
from .rings import exact_scalars, to_complex
from .superfield import SuperPath, configurational_superfield, d_dt, integrate_interval
from .supergeometry import (
    THETA,
    THETABAR,
    SUPERTIME_LABELS,
    SuperMatrix,
    metric_from_vierbein,
    superdeterminant,
    supertime_algebra,
)

DEFAULT_EPSILONS = (Fraction(1), Fraction(1, 2), Fraction(1, 10), Fraction(1, 1000), Fraction(1, 10 ** 6))


def exact(x):
    """Floats become the exact decimal they print as; everything else passes."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return x


def _alg():
    return supertime_algebra()


def even_entry(body, soul=0) -> Supernumber:
    """``body + soul·θ̄θ``."""
    alg = _alg()
    return alg.scalar(exact(body)) + alg.monomial((THETABAR, THETA), exact(soul))


def odd_entry(theta=0, thetabar=0) -> Supernumber:
    """``theta·θ + thetabar·θ̄``."""
    alg = _alg()
    return alg.gen(THETA) * alg.ring.convert(exact(theta)) + alg.gen(THETABAR) * alg.ring.convert(exact(thetabar))


def split_even(x: Supernumber):
    """(body, soul) of an even supertime number."""
    return x.body(), x.coefficient((THETABAR, THETA))


def split_odd(x: Supernumber):
    return x.coefficient((THETA,)), x.coefficient((THETABAR,))


def _pair(x):
    if isinstance(x, Supernumber):
        return split_even(x)
    if isinstance(x, (tuple, list)):
        body, soul = x
        return exact(body), exact(soul)
    return exact(x), 0


def _sign(sign) -> int:
    if sign in (1, "+", "+1"):
        return 1
    if sign in (-1, "-", "-1"):
        return -1
    raise ValueError(f"sign must be ±1, got {sign!r}")


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class VierbeinParams:
    a: Supernumber
    alpha: Supernumber
    beta: Supernumber
    gamma: Supernumber
    delta: Supernumber
    b: Supernumber
    c: Supernumber
    d: Supernumber
    e: Supernumber
    sign: int = 1
    eps: object = 1
    hbar: object = 1

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "e"):
            x = getattr(self, name)
            if x and x.parity() != 0:
                raise ValueError(f"{name} must be even")
        for name in ("alpha", "beta", "gamma", "delta"):
            x = getattr(self, name)
            if x and x.parity() != 1:
                raise ValueError(f"{name} must be odd")
        self.matrix()

    @classmethod
    def build(cls, *, a=1, alpha=0, beta=0, gamma=0, delta=0, b=1, c=0, d=0, e=1,
              sign=1, eps=1, hbar=1) -> "VierbeinParams":
        """Numbers and (body, soul) pairs for even slots, (θ, θ̄) pairs for odd."""
        alg = _alg()

        def ev(x):
            return x if isinstance(x, Supernumber) else even_entry(*_pair(x))

        def od(x):
            if isinstance(x, Supernumber):
                return x
            if x == 0:
                return alg.zero
            return odd_entry(*x)

        return cls(ev(a), od(alpha), od(beta), od(gamma), od(delta), ev(b), ev(c), ev(d), ev(e),
                   _sign(sign), exact(eps), exact(hbar))

    @classmethod
    def identity(cls) -> "VierbeinParams":
        return cls.build()

    def matrix(self) -> SuperMatrix:
        """The ``E^M_A`` array (flat index on rows)."""
        return SuperMatrix([[self.a, self.alpha, self.beta],
                            [self.gamma, self.b, self.c],
                            [self.delta, self.d, self.e]], _alg())

    def density(self) -> Supernumber:
        """E = sdet(E^A_M) = 1 / sdet(E^M_A)."""
        return superdeterminant(self.matrix()).inverse()

    def block_determinant(self) -> Supernumber:
        return self.b * self.e - self.c * self.d


# ---------------------------------------------------------------------------
# the kinetic constraint


def kinetic_operator(params: VierbeinParams, x: Supernumber) -> Supernumber:
    """D_τ x = a ∂_τ x + α ∂_θ x + β ∂_θ̄ x, with left derivatives."""
    alg = x.algebra
    a, al, be = (alg.convert(params.a), alg.convert(params.alpha), alg.convert(params.beta))
    return a * d_dt(x) + al * left_derivative(x, THETA) + be * left_derivative(x, THETABAR)


def check_kinetic_constraint(params: VierbeinParams, path: SuperPath) -> list:
    """D_τQ·D_τQ − ∂_τQ·∂_τQ for every configurational component Q_i."""
    out = []
    for Q in configurational_superfield(path):
        DQ = kinetic_operator(params, Q)
        dQ = d_dt(Q)
        out.append(DQ * DQ - dQ * dQ)
    return out


def kinetic_constraint_holds(params: VierbeinParams, path: SuperPath) -> bool:
    return not any(check_kinetic_constraint(params, path))


# ---------------------------------------------------------------------------
# constraint solutions


@dataclass
class BlockSolution:
    branch: int
    sign: int
    b: tuple
    c: tuple
    d: tuple
    e: tuple
    eps: object = 1
    hbar: object = 1
    params: VierbeinParams | None = field(default=None, repr=False)

    def components(self) -> dict:
        return {"b_B": self.b[0], "b_S": self.b[1], "c_B": self.c[0], "c_S": self.c[1],
                "d_B": self.d[0], "d_S": self.d[1], "e_B": self.e[0], "e_S": self.e[1]}

    def same_components(self, other: "BlockSolution") -> bool:
        ring = exact_scalars()
        mine, theirs = self.components(), other.components()
        return self.branch == other.branch and all(ring.convert(mine[k]) == ring.convert(theirs[k]) for k in mine)


def _branch(e_B, d_B) -> int:
    if e_B != 0:
        return 1
    if d_B != 0:
        return 2
    raise NoSolutionBranch("both e_B and d_B vanish; neither solution branch applies")


def _assemble(sol: BlockSolution, gamma=0, delta=0) -> VierbeinParams:
    return VierbeinParams.build(a=sol.sign, gamma=gamma, delta=delta, b=sol.b, c=sol.c, d=sol.d,
                                e=sol.e, sign=sol.sign, eps=sol.eps, hbar=sol.hbar)


def _solve(c, d, e, sign, eps, shift, b):
    """Shared body of both families: ``be − cd = ±(ε + shift·θ̄θ)``.

    Body and soul are solved term by term; ``shift`` carries the extra soul
    of the quantum family (0 for the classical one).
    """
    s = _sign(sign)
    (c_B, c_S), (d_B, d_S), (e_B, e_S) = _pair(c), _pair(d), _pair(e)
    b_B, b_S = _pair(b) if b is not None else (0, 0)
    ring = exact_scalars()
    C = ring.convert
    c_B, c_S, d_B, d_S, e_B, e_S, b_B, b_S = map(C, (c_B, c_S, d_B, d_S, e_B, e_S, b_B, b_S))
    eps, shift = C(eps), C(shift)
    if _branch(e_B, d_B) == 1:
        b_B = (s * eps + c_B * d_B) * ring.inverse(e_B)
        b_S = (-s * eps * e_S - c_B * d_B * e_S + c_B * d_S * e_B + c_S * d_B * e_B + s * shift * e_B) \
            * ring.inverse(e_B * e_B)
        return 1, (b_B, b_S), (c_B, c_S)
    c_B = -s * eps * ring.inverse(d_B)
    c_S = (s * eps * d_S + b_B * d_B * e_S - s * shift * d_B) * ring.inverse(d_B * d_B)
    return 2, (b_B, b_S), (c_B, c_S)


def solve_classical(c, d, e, sign=1, b=None) -> BlockSolution:
    """Solve ``be − cd = ±1`` for b (e_B ≠ 0) or for c (e_B = 0, d_B ≠ 0).

    Entries are numbers or ``(body, soul)`` pairs; ``b`` is only read on the
    second branch, where its soul stays free.
    """
    s = _sign(sign)
    branch, bb, cc = _solve(c, d, e, s, 1, 0, b)
    sol = BlockSolution(branch, s, bb, cc, _pair_exact(d), _pair_exact(e))
    sol.params = _assemble(sol)
    if sol.params.block_determinant() != _alg().scalar(s):
        raise AssertionError("classical solution violates be − cd = ±1")  # pragma: no cover
    return sol


def _pair_exact(x):
    ring = exact_scalars()
    body, soul = _pair(x)
    return ring.convert(body), ring.convert(soul)


QUANTUM_CONVENTIONS = ("interpolating", "exact")


def quantum_target(eps, hbar, convention: str = "interpolating") -> Supernumber:
    """Density realized by the quantum family.

    ``exact`` is ``ε − iθ̄θ/ħ``.  ``interpolating`` is ``ε − (1−ε) iθ̄θ/ħ``,
    which equals 1 at ε = 1 and so contains the classical family.
    """
    alg = _alg()
    ring = alg.ring
    eps, hbar = ring.convert(exact(eps)), ring.convert(exact(hbar))
    soul = ring.convert(-1j) * ring.inverse(hbar)
    if convention == "interpolating":
        soul = soul * (ring.one - eps)
    elif convention != "exact":
        raise ValueError(f"convention must be one of {QUANTUM_CONVENTIONS}")
    return alg.scalar(eps) + alg.monomial((THETABAR, THETA), soul)


@dataclass
class QuantumSolution(BlockSolution):
    convention: str = "interpolating"
    p: object = None
    q: object = None
    r: object = None
    density: Supernumber | None = field(default=None, repr=False)
    target: Supernumber | None = field(default=None, repr=False)
    checks: dict = field(default_factory=dict)


def _quantum_components(c, d, e, sign, eps, hbar, b, convention):
    ring = exact_scalars()
    eps_r = ring.convert(exact(eps))
    i_hbar = ring.convert(1j) * ring.inverse(ring.convert(exact(hbar)))
    if convention == "interpolating":
        shift = -(ring.one - eps_r) * i_hbar
    elif convention == "exact":
        shift = -i_hbar
    else:
        raise ValueError(f"convention must be one of {QUANTUM_CONVENTIONS}")
    return _solve(c, d, e, sign, eps_r, shift, b)


def pqr_decomposition(params: VierbeinParams):
    """``pθ̄θ = (α β) D⁻¹ (γ δ)ᵀ`` and ``q + rθ̄θ = det⁻¹ D`` for D = [[b, c], [d, e]]."""
    alg = _alg()
    det = params.block_determinant()
    inv_det = det.inverse()
    Dinv = [[params.e * inv_det, -params.c * inv_det], [-params.d * inv_det, params.b * inv_det]]
    row = (params.alpha, params.beta)
    col = (params.gamma, params.delta)
    sandwich = alg.zero
    for i in range(2):
        for j in range(2):
            sandwich = sandwich + row[i] * Dinv[i][j] * col[j]
    p = sandwich.coefficient((THETABAR, THETA))
    if sandwich != alg.monomial((THETABAR, THETA), p):
        raise AssertionError("odd sandwich is not proportional to θ̄θ")  # pragma: no cover
    q, r = split_even(inv_det)
    return p, q, r


def solve_quantum(c, d, e, sign=1, eps=Fraction(1, 2), hbar=1, b=None,
                  convention: str = "interpolating") -> QuantumSolution:
    """Quantum family with ``a_S = α = β = 0``.

    The result carries the p, q, r decomposition, the density of the
    assembled vierbein and the checks against the target density.
    """
    if exact(eps) == 0:
        raise RegulatorRequired("ε = 0 gives a density with zero body, which has no inverse")
    s = _sign(sign)
    branch, bb, cc = _quantum_components(c, d, e, s, eps, hbar, b, convention)
    sol = QuantumSolution(branch, s, bb, cc, _pair_exact(d), _pair_exact(e), exact(eps), exact(hbar),
                          convention=convention)
    params = _assemble(sol)
    sol.params = params
    p, q, r = pqr_decomposition(params)
    sol.p, sol.q, sol.r = p, q, r
    alg = _alg()
    a_S = split_even(params.a)[1]
    tt = alg.monomial((THETABAR, THETA))
    # E⁻¹ = (±1 + a_Sθ̄θ − pθ̄θ)(q + rθ̄θ)
    from_pqr = (alg.scalar(s) + tt * a_S - tt * p) * (alg.scalar(q) + tt * r)
    sdet_direct = superdeterminant(params.matrix())
    sol.density = sdet_direct.inverse()
    sol.target = quantum_target(eps, hbar, convention)
    interp = quantum_target(eps, hbar, "interpolating")
    exact_t = quantum_target(eps, hbar, "exact")
    sol.checks = {
        "pqr_matches_sdet": from_pqr == sdet_direct,
        "p_vanishes": p == 0,
        "inverse_matches_target": sdet_direct == sol.target.inverse(),
        "density_is_interpolating_family": sol.density == interp,
        "density_is_exact_family": sol.density == exact_t,
    }
    return sol


# ---------------------------------------------------------------------------
# the action


@dataclass
class VierbeinAction:
    """S = i∫dτdθdθ̄ E L with E = E_B + E_S θ̄θ, split accordingly."""

    action: Supernumber
    body_term: Supernumber
    soul_term: Supernumber
    density: Supernumber


def _kinetic_lagrangian(params: VierbeinParams, V: PolynomialObservable, fields: list, alg) -> Supernumber:
    out = -evaluate_polynomial(V.poly, list(fields) + [alg.zero] * len(fields), alg.one)
    half = Fraction(1, 2)
    for x in fields:
        dx = kinetic_operator(params, x)
        out = out + dx * dx * half
    return out


def _check_potential(V: PolynomialObservable, n: int):
    if V.n != n:
        raise ValueError(f"potential has n = {V.n}, path has n = {n}")
    if any(V.diff(n + i) for i in range(n)):
        raise ValueError("the potential may depend on positions only")


def action_from_vierbein(params: VierbeinParams | None, V: PolynomialObservable, path: SuperPath,
                         sdet: Supernumber | None = None, interval=None) -> VierbeinAction:
    """Exact action on a polynomial path.

    ``sdet`` overrides the density computed from the vierbein; this is how a
    density with a chosen soul is imposed directly.
    """
    params = params or VierbeinParams.identity()
    n = path.n
    _check_potential(V, n)
    t0, t1 = interval if interval is not None else (path.t0, path.t1)
    alg = path.algebra
    E = params.density() if sdet is None else sdet
    E_path = alg.convert(E)
    tt = alg.monomial((THETABAR, THETA))
    E_B = alg.scalar(E_path.body())
    E_S = E_path.coefficient((THETABAR, THETA))
    L = _kinetic_lagrangian(params, V, configurational_superfield(path), alg)

    def S(weight):
        return integrate_interval(berezin_integrate(weight * L, SUPERTIME_LABELS), t0, t1) * 1j

    body_term = S(E_B)
    soul_term = S(tt * alg.scalar(E_S))
    return VierbeinAction(body_term + soul_term, body_term, soul_term, E)


def qpi_weight(V: PolynomialObservable, path: SuperPath, hbar=1, interval=None) -> Supernumber:
    """(1/ħ)∫dτ (½q̇² − V(q)) on the body path, without superfields."""
    n = path.n
    _check_potential(V, n)
    t0, t1 = interval if interval is not None else (path.t0, path.t1)
    alg = path.algebra
    ring = alg.ring
    q = [alg.scalar(path.field.phi[i]) for i in range(n)]
    L = -evaluate_polynomial(V.poly, q + [alg.zero] * n, alg.one)
    for x in q:
        L = L + d_dt(x) * d_dt(x) * Fraction(1, 2)
    return integrate_interval(L, t0, t1) * ring.inverse(ring.convert(exact(hbar)))


def supernorm(x: Supernumber) -> float:
    """Largest coefficient modulus (coefficients must be constants)."""
    return max((abs(to_complex(c)) for c in x.terms.values()), default=0.0)


# ---------------------------------------------------------------------------
# metrics


@dataclass
class MetricFamily:
    params: VierbeinParams
    metric: SuperMatrix
    pis: tuple
    expected: SuperMatrix
    mismatches: list

    @property
    def pattern_ok(self) -> bool:
        return not self.mismatches


def pi_parameters(gamma, delta, b_B, c_B, d_B, e_B) -> tuple:
    g_t, g_tb = gamma
    d_t, d_tb = delta
    return (g_t * e_B - d_t * c_B,
            g_tb * e_B - d_tb * c_B,
            d_t * b_B - g_t * d_B,
            d_tb * b_B - g_tb * d_B,
            g_tb * d_t - g_t * d_tb)


def metric_pattern(pis, sign: int) -> SuperMatrix:
    """The five-parameter metric; ``sign`` picks the upper (+1) or lower row of ±."""
    alg = _alg()
    th, thb = alg.gen(THETA), alg.gen(THETABAR)
    tt = alg.monomial((THETABAR, THETA))
    C = alg.ring.convert
    p1, p2, p3, p4, p5 = (C(exact(x)) for x in pis)
    s = sign
    u = th * p1 + thb * p2
    v = th * p3 + thb * p4
    rows = [[alg.one, -u * s, -v * s],
            [u * s, alg.zero, -(alg.one + tt * p5) * s],
            [v * s, (alg.one + tt * p5) * s, alg.zero]]
    return SuperMatrix(rows, alg)


def classical_metric_family(gamma=(0, 0), delta=(0, 0), c=0, d=0, e=1, sign=1, b=None) -> MetricFamily:
    """Metric of the classical vierbein with the given bodies.

    ``gamma`` and ``delta`` are (θ, θ̄) components; b (branch one) or c
    (branch two) comes from the determinant constraint.
    """
    s = _sign(sign)
    sol = solve_classical(exact(c), exact(d), exact(e), s, b=None if b is None else exact(b))
    gamma = tuple(exact(x) for x in gamma)
    delta = tuple(exact(x) for x in delta)
    params = _assemble(sol, gamma=gamma, delta=delta)
    inverse = params.matrix().inverse()
    g = metric_from_vierbein(inverse)
    pis = pi_parameters(gamma, delta, sol.b[0], sol.c[0], sol.d[0], sol.e[0])
    expected = metric_pattern(pis, s)
    bad = [(i, j) for i in range(3) for j in range(3) if g[i, j] != expected[i, j]]
    ring = exact_scalars()
    return MetricFamily(params, g, tuple(ring.convert(x) for x in pis), expected, bad)


def quantum_metric(c=0, d=0, e=1, sign=1, eps=Fraction(1, 2), hbar=1, gamma=(0, 0), delta=(0, 0),
                   convention: str = "interpolating") -> SuperMatrix:
    """Metric of the quantum family; at ε = 0 the inversion step fails.

    The regulator check of :func:`solve_quantum` is bypassed on purpose so
    that the ε = 0 vierbein can be built and shown to be non-invertible.
    """
    s = _sign(sign)
    branch, bb, cc = _quantum_components(exact(c), exact(d), exact(e), s, eps, hbar, None, convention)
    sol = BlockSolution(branch, s, bb, cc, _pair_exact(d), _pair_exact(e), exact(eps), exact(hbar))
    params = _assemble(sol, gamma=tuple(exact(x) for x in gamma), delta=tuple(exact(x) for x in delta))
    return metric_from_vierbein(params.matrix().inverse())


# ---------------------------------------------------------------------------
# ε sweep


@dataclass
class SweepRow:
    eps: object
    classical_residual: float
    quantum_residual: float


def epsilon_sweep(V: PolynomialObservable, path: SuperPath, epsilons: Sequence = DEFAULT_EPSILONS,
                  hbar=1, block=((1, 0), (1, 0), (1, 0)), sign=1) -> list:
    """Distance of the quantum-family action to the CPI and QPI weights.

    For each ε the vierbein comes from :func:`solve_quantum` (interpolating
    convention), so ε = 1 is the classical family and ε → 0 approaches the
    quantum weight.
    """
    c, d, e = block
    classical = action_from_vierbein(None, V, path).action
    quantum = qpi_weight(V, path, hbar)
    rows = []
    for eps in epsilons:
        sol = solve_quantum(c, d, e, sign, eps, hbar)
        S = action_from_vierbein(sol.params, V, path).action
        rows.append(SweepRow(exact(eps), supernorm(S - classical), supernorm(S - quantum)))
    return rows


def sweep_to_csv(rows: Sequence[SweepRow], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eps", "classical_residual", "quantum_residual"])
        for r in rows:
            w.writerow([repr(float(r.eps)), repr(r.classical_residual), repr(r.quantum_residual)])
    return path
