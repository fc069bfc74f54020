"""Named groups of checks run by the command line and the acceptance tests.

Every check returns a :class:`Check`.  Exact checks report the number of
failing cases as their residual; numeric checks report the largest error.
All randomness comes from the ``random.Random`` handed in by the caller.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import kernels
from .errors import SingularOddBlock
from .extended import (
    ExtendedPoint,
    ExtendedSpace,
    build_charge,
    build_superhamiltonian,
    equations_of_motion_check,
    extended_flow,
    extended_poisson_bracket,
)
from .grassmann import GrassmannAlgebra, berezin_integrate, invert, nilpotent_exp
from .kvn import (
    GridSpec,
    KvNWave,
    closed_form_free,
    closed_form_oscillator,
    cpi_kernel_compose,
    density_consistency,
    evolve_wave,
    form_pairing_invariance,
    gaussian_blob,
    uniform_slices,
)
from .path_integral import (
    DiscretizedAction,
    free_kernel,
    kernel_compare,
    kernel_convergence,
    qpi_kernel_quadratic,
)
from .phase_flow import PolynomialObservable, hamilton_flow, omega, random_polynomial
from .rings import exact_scalars
from .superfield import (
    THETA_LABELS,
    EndpointData,
    Superfield,
    compose_by_substitution,
    compose_observable,
    dequantize_action,
    lagrangian_identity_check,
    observable_multiplet,
    random_path,
    superfield_bracket_check,
    surface_term_cancellation,
    susy_conjugation,
    to_extended,
)
from .supergeometry import (
    ETA,
    OSP12_GENERATORS,
    SuperMatrix,
    anticommutator,
    apply_operator,
    metric_from_vierbein,
    osp_invariant,
    superdeterminant,
    supertime_algebra,
    SupertimeFunction,
)
from .vierbein import (
    DEFAULT_EPSILONS,
    VierbeinParams,
    action_from_vierbein,
    check_kinetic_constraint,
    classical_metric_family,
    epsilon_sweep,
    exact,
    qpi_weight,
    quantum_metric,
    quantum_target,
    solve_classical,
    solve_quantum,
    supernorm,
    sweep_to_csv,
)

SUITES = ("algebra", "supergeometry", "dynamics", "superfield", "kvn", "kernels", "vierbein")


@dataclass
class Check:
    name: str
    passed: bool
    residual: float
    ref: str
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "status": "pass" if self.passed else "fail",
                "residual": float(self.residual), "ref": self.ref, "detail": self.detail}


def _exact_check(name, ref, failures, total, **detail):
    return Check(name, failures == 0, float(failures), ref, {"cases": total, **detail})


def _numeric_check(name, ref, error, tol, **detail):
    error = float(error)
    return Check(name, bool(error <= tol), error, ref, {"tolerance": tol, **detail})


def _seed(rng: random.Random) -> int:
    return rng.randrange(2 ** 31)


# ---------------------------------------------------------------------------
# algebra


def _random_supernumber(alg: GrassmannAlgebra, rng: random.Random, terms: int = 6, parity=None):
    out = alg.zero
    for _ in range(terms):
        mask = rng.randrange(1 << alg.ngens)
        if parity is not None and bin(mask).count("1") % 2 != parity:
            continue
        out = out + alg.element({mask: Fraction(rng.randint(-5, 5), rng.randint(1, 3))})
    return out


def check_supernumber_axioms(rng: random.Random, count: int = 30) -> Check:
    alg = GrassmannAlgebra(("g1", "g2", "g3", "g4", "g5"), exact_scalars())
    bad = 0
    for _ in range(count):
        x, y, z = (_random_supernumber(alg, rng) for _ in range(3))
        if (x * y) * z != x * (y * z) or x * (y + z) != x * y + x * z:
            bad += 1
        u = _random_supernumber(alg, rng, parity=1)
        if u * u:
            bad += 1
        e = _random_supernumber(alg, rng, parity=0) + 1
        if e * invert(e) != alg.one:
            bad += 1
        s = _random_supernumber(alg, rng, parity=0).soul()
        if nilpotent_exp(s) * nilpotent_exp(-s) != alg.one:
            bad += 1
    return _exact_check("supernumber_axioms", "associativity, nilpotency, inverse, exp", bad, count)


def check_berezin_normalization() -> Check:
    alg = supertime_algebra()
    th, thb = alg.gens()
    ok = berezin_integrate(thb * th, THETA_LABELS) == alg.one and not berezin_integrate(th, THETA_LABELS)
    return _exact_check("berezin_normalization", "∫dθdθ̄ θ̄θ = 1", 0 if ok else 1, 1)


def check_backend_agreement(rng: random.Random, count: int = 20) -> Check:
    backs = kernels.backends()
    if len(backs) < 2:
        return Check("backend_agreement", True, 0.0, "compiled vs reference kernels", {"skipped": "no compiled backend"})
    py, cy = backs["python"], backs["cython"]
    err = 0.0
    for _ in range(count):
        a = {rng.randrange(64): rng.randint(-9, 9) for _ in range(6)}
        b = {rng.randrange(64): rng.randint(-9, 9) for _ in range(6)}
        if py.graded_mul(a, b) != cy.graded_mul(a, b):
            err = max(err, 1.0)
    nrng = np.random.default_rng(_seed(rng))
    v = nrng.normal(size=(12, 9))
    xi, yi = nrng.uniform(-1, 12, 50), nrng.uniform(-1, 9, 50)
    err = max(err, float(np.max(np.abs(py.cubic_interp2d(v, xi, yi) - cy.cubic_interp2d(v, xi, yi)))))
    diag, off = nrng.uniform(1.5, 2.5, 40), nrng.uniform(-1, 1, 39)
    err = max(err, float(np.max(np.abs(py.gelfand_yaglom(diag, off) - cy.gelfand_yaglom(diag, off)))))
    rhs = nrng.normal(size=40)
    err = max(err, float(np.max(np.abs(py.tridiag_solve(diag, off, rhs) - cy.tridiag_solve(diag, off, rhs)))))
    return _numeric_check("backend_agreement", "compiled vs reference kernels", err, 1e-12)


def suite_algebra(rng: random.Random, cfg: dict) -> list:
    return [check_supernumber_axioms(rng), check_berezin_normalization(), check_backend_agreement(rng)]


# ---------------------------------------------------------------------------
# supergeometry


def check_osp_invariance() -> Check:
    F = osp_invariant()
    bad = [x for x in OSP12_GENERATORS if apply_operator(x, F)]
    return _exact_check("osp12_invariance", "OSp(1,2) leaves t² − 2θ̄θ invariant", len(bad), 5, failing=bad)


def check_omega_anticommutator() -> Check:
    f = SupertimeFunction.from_expr(lambda t, th, thb: t ** 3 + t * th + 3 * thb + t * t * (thb * th))
    lhs = anticommutator("Omega_H", "Omegabar_H", f)
    rhs = apply_operator("d_t", f) * -2
    return _exact_check("omega_anticommutator", "{Ω_H, Ω̄_H} = −2∂_t", 0 if lhs == rhs else 1, 1)


def check_flat_metric() -> Check:
    alg = supertime_algebra()
    g = metric_from_vierbein(SuperMatrix.identity(alg))
    bad = sum(1 for i in range(3) for j in range(3) if g[i, j] != alg.scalar(ETA[i][j]))
    return _exact_check("flat_metric", "identity vierbein gives η", bad, 9)


def _random_supermatrix(alg, rng):
    th, thb = alg.gens()

    def even(body_min=0):
        return alg.scalar(Fraction(rng.randint(1, 5), rng.randint(1, 3))) + (thb * th) * Fraction(rng.randint(-3, 3))

    def odd():
        return th * Fraction(rng.randint(-3, 3)) + thb * Fraction(rng.randint(-3, 3))

    return SuperMatrix([[even(), odd(), odd()], [odd(), even(), even()], [odd(), even(), even()]], alg)


def check_sdet_multiplicative(rng: random.Random, count: int = 10) -> Check:
    alg = supertime_algebra()
    bad = 0
    tried = 0
    for _ in range(count):
        M, N = _random_supermatrix(alg, rng), _random_supermatrix(alg, rng)
        try:
            lhs = superdeterminant(M @ N)
            rhs = superdeterminant(M) * superdeterminant(N)
        except SingularOddBlock:
            continue
        tried += 1
        bad += lhs != rhs
    return _exact_check("sdet_multiplicative", "sdet(MN) = sdet M sdet N", bad, tried)


def suite_supergeometry(rng: random.Random, cfg: dict) -> list:
    return [check_osp_invariance(), check_omega_anticommutator(), check_flat_metric(),
            check_sdet_multiplicative(rng)]


# ---------------------------------------------------------------------------
# dynamics


def _proportionality(A, B):
    """κ with A = κB exactly, or None."""
    ring = A.space.ring
    if not B.value:
        return None if A.value else ring.zero
    mask, coeff = next(iter(B.value.terms.items()))
    other = A.value.terms.get(mask)
    if other is None:
        return None
    k = other.LC / coeff.LC
    kappa = ring.convert(k) if not hasattr(ring, "R") else ring.R.ground_new(k)
    return kappa if A == B * kappa else None


def random_hamiltonians(rng: random.Random, count: int, degree: int = 4, ns=(1, 2)) -> list:
    out = []
    for i in range(count):
        n = ns[i % len(ns)]
        H = random_polynomial(n, degree, rng, min_degree=1)
        out.append(H)
    return out


def check_susy_algebra(rng: random.Random, count: int = 8) -> Check:
    kappas = set()
    bad = 0
    for H in random_hamiltonians(rng, count, degree=4):
        Hs = build_superhamiltonian(H)
        QH, QbH = build_charge("Q_H", H), build_charge("Qbar_H", H)
        k = _proportionality(extended_poisson_bracket(QH, QbH), Hs)
        if k is None:
            bad += 1
        else:
            kappas.add(str(k.as_expr()))
    single = len(kappas) == 1
    return _exact_check("susy_algebra", "{Q_H, Q̄_H} = κ_s ℋ with one global κ_s",
                        bad + (0 if single else 1), count, kappa=sorted(kappas))


def check_conservation(rng: random.Random, count: int = 6) -> Check:
    bad = 0
    for H in random_hamiltonians(rng, count, degree=4):
        Hs = build_superhamiltonian(H)
        for name in ("Q_H", "Qbar_H", "N", "Nbar"):
            if extended_poisson_bracket(Hs, build_charge(name, H)):
                bad += 1
    return _exact_check("charge_conservation", "{ℋ, X} = 0 for Q_H, Q̄_H, N, N̄", bad, count * 4)


GHOST_HAMILTONIANS = {"oscillator": "(p**2 + q**2)/2", "free": "p**2/2", "quartic": "p**2/2 + q**4/4"}
GHOST_TIMES = (0.1, 1.0, 3.0)


def _fd_jacobian(H, x0, t, h=1e-3):
    d = len(x0)
    J = np.zeros((d, d))
    stencil = [(-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)]
    for b in range(d):
        col = np.zeros(d)
        for k, w in stencil:
            x = np.array(x0, float)
            x[b] += k * h
            col += w / h * hamilton_flow(H, x, t, 1e-13).endpoint.phi
        J[:, b] = col
    return J


def check_ghost_jacobi(x0=(0.7, -0.4), tol: float = 1e-8) -> Check:
    worst = 0.0
    worst_sym = 0.0
    w = omega(1)
    cases = {}
    for label, expr in GHOST_HAMILTONIANS.items():
        H = PolynomialObservable.from_expr(expr)
        for t in GHOST_TIMES:
            ext = extended_flow(H, ExtendedPoint(np.array(x0), np.zeros(2)), t, 1e-12)
            fd = _fd_jacobian(H, x0, t)
            var = hamilton_flow(H, np.array(x0), t, 1e-12).jacobi
            err = max(float(np.max(np.abs(ext.J - fd))), float(np.max(np.abs(ext.J - var))))
            sym = float(np.max(np.abs(ext.J.T @ w @ ext.J - w)))
            cases[f"{label}@{t}"] = err
            worst = max(worst, err)
            worst_sym = max(worst_sym, sym)
    err = max(worst, worst_sym)
    return _numeric_check("ghost_is_jacobi", "ghost transport equals the flow Jacobi matrix; JᵀωJ = ω",
                          err, tol, jacobi_error=worst, symplectic_error=worst_sym)


def check_equations_of_motion(H: PolynomialObservable | None = None, tol: float = 1e-8) -> Check:
    if H is None:
        H = PolynomialObservable.from_expr("p**2/2 + q**2/2 + q**4/10")
    d = 2 * H.n
    x0 = np.resize(np.array([0.5, 0.2]), d)
    c0 = np.resize(np.array([0.3, -0.1]), d)
    rep = equations_of_motion_check(H, ExtendedPoint(x0, c0), 0.8)
    signs = {f"{k}{a}": v["sign"] for (k, a), v in rep.items()}
    res = max(v["residual"] for v in rep.values())
    ok = all(s == 1 for s in signs.values())
    c = _numeric_check("equations_of_motion", "Ż = {Z, ℋ} for every extended coordinate", res, tol, signs=signs)
    c.passed = c.passed and ok
    return c


def suite_dynamics(rng: random.Random, cfg: dict) -> list:
    checks = [check_susy_algebra(rng), check_conservation(rng), check_ghost_jacobi(), check_equations_of_motion()]
    if "hamiltonian" in cfg:
        H = PolynomialObservable.from_expr(cfg["hamiltonian"], int(cfg.get("n", 1)))
        c = check_equations_of_motion(H)
        c.name = "equations_of_motion_configured"
        checks.append(c)
    return checks


# ---------------------------------------------------------------------------
# superfield


def check_multiplet_identity(rng: random.Random, count: int = 20) -> Check:
    bad = 0
    for H in random_hamiltonians(rng, count, degree=4):
        Phi = Superfield.symbolic(H.n)
        lhs = berezin_integrate(compose_observable(H, Phi), THETA_LABELS) * 1j
        if to_extended(lhs, Phi.space) != build_superhamiltonian(H):
            bad += 1
    return _exact_check("multiplet_identity", "i∫dθdθ̄ H[Φ] = ℋ", bad, count)


def check_multiplet_charges(rng: random.Random, count: int = 6) -> Check:
    bad = 0
    for H in random_hamiltonians(rng, count, degree=4):
        Phi = Superfield.symbolic(H.n)
        comps = observable_multiplet(H, Phi)
        sp = Phi.space
        bad += to_extended(comps["N"], sp) != build_charge("N", H)
        bad += to_extended(comps["Nbar"], sp) != build_charge("Nbar", H)
        bad += to_extended(comps["calH"], sp) != build_superhamiltonian(H)
        bad += compose_observable(H, Phi) != compose_by_substitution(H, Phi)
    return _exact_check("multiplet_charges", "superfield components are N, N̄ and ℋ", bad, count)


def check_susy_conjugation(rng: random.Random, count: int = 6) -> Check:
    bad = 0
    for H in random_hamiltonians(rng, count, degree=3):
        Phi = Superfield.symbolic(H.n)
        alg = Phi.algebra
        bad += alg.convert(susy_conjugation(H)) != compose_observable(H, Phi)
    return _exact_check("susy_conjugation", "θ-translation by the charges equals G(Φ)", bad, count)


def check_superfield_bracket() -> Check:
    bad = 0
    total = 0
    for n in (1, 2):
        res = superfield_bracket_check(n)
        total += len(res)
        bad += sum(1 for ok in res.values() if not ok)
    return _exact_check("superfield_bracket", "{Φ^a(θ), Φ^b(θ′)} = −iω^{ab}(θ̄−θ̄′)(θ−θ′)", bad, total)


LAGRANGIAN_HAMILTONIANS = ("p**2/2 + q**2/2", "p**2/2 + q**4/4 - q**2", "p**3/3 + p*q**2 + q")


def check_lagrangian_identity(rng: random.Random, count: int = 50) -> Check:
    bad = 0
    for i in range(count):
        H = PolynomialObservable.from_expr(LAGRANGIAN_HAMILTONIANS[i % len(LAGRANGIAN_HAMILTONIANS)])
        path = random_path(1, degree=rng.randint(1, 4), seed=_seed(rng))
        bad += not lagrangian_identity_check(H, path).passed
    return _exact_check("lagrangian_identity", "i∫dθdθ̄ L(Φ) = ℒ − dB/dt", bad, count)


def check_surface_cancellation(rng: random.Random, count: int = 50) -> Check:
    bad = 0
    for i in range(count):
        data = EndpointData.random(n=1 + i % 2, seed=_seed(rng))
        out = surface_term_cancellation(data)
        bad += out != out.algebra.one
    return _exact_check("surface_cancellation", "boundary factors absorb the surface terms", bad, count)


def check_dequantization(rng: random.Random, count: int = 5) -> Check:
    bad = 0
    V = PolynomialObservable.from_expr("q**2/2 + q**4/6")
    for _ in range(count):
        path = random_path(1, degree=3, seed=_seed(rng))
        w = dequantize_action(V, path, hbar=Fraction(rng.randint(1, 5), rng.randint(1, 5)))
        bad += not all(w.checks().values())
    return _exact_check("dequantization", "φ → Φ, ∫dτ → iħ∫dτdθdθ̄ gives the CPI weight", bad, count)


def suite_superfield(rng: random.Random, cfg: dict) -> list:
    return [check_multiplet_identity(rng), check_multiplet_charges(rng), check_susy_conjugation(rng),
            check_superfield_bracket(), check_lagrangian_identity(rng), check_surface_cancellation(rng),
            check_dequantization(rng)]


# ---------------------------------------------------------------------------
# kvn


def kvn_grid(cfg: dict) -> GridSpec:
    pts = int(cfg.get("grid_points", 256))
    lo, hi = float(cfg.get("grid_min", -6.0)), float(cfg.get("grid_max", 6.0))
    return GridSpec(lo, hi, pts, lo, hi, pts)


def check_kvn_closed_forms(grid: GridSpec, tol: float = 1e-3, out_dir: Path | None = None) -> list:
    blob = gaussian_blob()
    psi0 = KvNWave.from_function(grid, blob)
    checks = []
    cases = [("free_shear", "p**2/2", closed_form_free, 1.0),
             ("oscillator_rotation", "(p**2 + q**2)/2", closed_form_oscillator, math.pi / 2)]
    for name, expr, exact_f, t in cases:
        H = PolynomialObservable.from_expr(expr)
        out = evolve_wave(H, psi0, t)
        ref = KvNWave.from_function(grid, exact_f(blob, t))
        err = float(np.max(np.abs(out.values - ref.values)))
        checks.append(_numeric_check(f"kvn_{name}", "ψ(t) = ψ0 ∘ Φ_{-t}", err, tol))
        if out_dir is not None and name == "oscillator_rotation":
            out.to_csv(Path(out_dir) / "wave_snapshot.csv")
    return checks


def check_kvn_norms(grid: GridSpec, tol: float = 1e-3) -> list:
    H = PolynomialObservable.from_expr("(p**2 + q**2)/2")
    psi0 = KvNWave.from_function(grid, gaussian_blob(momentum=1.5))
    rep = density_consistency(H, psi0, 2 * math.pi)
    return [
        _numeric_check("kvn_l1_density", "L¹(ρ) conserved over one period", rep.l1_drift, tol),
        _numeric_check("kvn_l2_wave", "L²(ψ) conserved over one period", rep.l2_drift, tol),
        _numeric_check("kvn_density_consistency", "ρ evolved directly equals |ψ|²",
                       rep.relative_discrepancy, tol),
    ]


def check_kvn_forms(tol: float = 1e-8) -> Check:
    H = PolynomialObservable.from_expr("p**2/2 + q**4/4")
    F1 = [PolynomialObservable.from_expr("q*p"), PolynomialObservable.from_expr("q**2 + 1")]
    err = max(form_pairing_invariance(H, F1, [0.6, -0.3], t, tol=1e-12) for t in (0.5, 2.0))
    return _numeric_check("form_pairing_invariance", "F_a(t)c^a(t) constant along the extended flow", err, tol)


def check_cpi_compose(tol: float = 1e-8) -> Check:
    H = PolynomialObservable.from_expr("p**2/2 + q**4/4 - q**2/2")
    err = cpi_kernel_compose(H, [0.4, 0.9], uniform_slices(3.0, 12), tol=1e-12).discrepancy
    return _numeric_check("cpi_slice_composition", "sliced classical kernel composes to one flow", err, tol)


def suite_kvn(rng: random.Random, cfg: dict, out_dir: Path | None = None) -> list:
    grid = kvn_grid(cfg)
    tol = float(cfg.get("kvn_tol", 1e-3))
    return (check_kvn_closed_forms(grid, tol, out_dir) + check_kvn_norms(grid, tol)
            + [check_kvn_forms(), check_cpi_compose()])


# ---------------------------------------------------------------------------
# kernels


def check_free_kernel(rng: random.Random, tol: float = 1e-12) -> Check:
    err = 0.0
    for N in (2, 3, 17, 256, 4096):
        m, hb, t = Fraction(rng.randint(1, 4)), Fraction(rng.randint(1, 4), 2), rng.uniform(0.2, 3.0)
        q0, q1 = rng.uniform(-2, 2), rng.uniform(-2, 2)
        spec = DiscretizedAction.free(N, t, float(m), float(hb))
        K = qpi_kernel_quadratic(spec, q0, q1)
        ref = free_kernel(float(m), float(hb), t, q0, q1)
        err = max(err, abs(K - ref) / abs(ref))
    return _numeric_check("free_kernel_exact", "sliced free kernel equals the continuum kernel", err, tol)


def check_oscillator_kernel(slices: int = 4096, tol: float = 1e-3, out_dir: Path | None = None) -> list:
    spec = DiscretizedAction.harmonic(slices, 1.0)
    rep = kernel_compare(spec)
    if out_dir is not None:
        rep.to_csv(Path(out_dir) / "kernel_table.csv")
    return [
        _numeric_check("oscillator_modulus", "sliced oscillator kernel vs Mehler (modulus)",
                       rep.max_modulus_error, tol, slices=slices),
        _numeric_check("oscillator_phase", "sliced oscillator kernel vs Mehler (phase, rad)",
                       rep.max_phase_error, tol, slices=slices),
    ]


def check_kernel_convergence(slices=(512, 1024, 2048)) -> Check:
    conv = kernel_convergence(DiscretizedAction.harmonic(slices[0], 1.0), slices)
    dev = max(abs(r - 2.0) for r in conv.ratios)
    c = _numeric_check("kernel_error_halving", "error halves per doubling of slices", dev, 0.1,
                       ratios=conv.ratios, order=conv.order)
    c.passed = c.passed and conv.monotone
    return c


def suite_kernels(rng: random.Random, cfg: dict, out_dir: Path | None = None) -> list:
    slices = int(cfg.get("slices", 4096))
    return ([check_free_kernel(rng)] + check_oscillator_kernel(slices, out_dir=out_dir)
            + [check_kernel_convergence()])


# ---------------------------------------------------------------------------
# vierbein


def _random_block(rng, branch):
    def num(nonzero=False):
        while True:
            x = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            if x or not nonzero:
                return x

    c = (num(), num())
    d = (num(nonzero=branch == 2), num())
    e = (num(nonzero=True), num()) if branch == 1 else (Fraction(0), num())
    b = (num(), num())
    return c, d, e, b


def check_classical_sdet(rng: random.Random, count: int = 40) -> Check:
    bad = 0
    for i in range(count):
        branch = 1 + i % 2
        c, d, e, b = _random_block(rng, branch)
        sol = solve_classical(c, d, e, rng.choice((1, -1)), b=b)
        bad += sol.params.density() != sol.params.density().algebra.one
    return _exact_check("classical_sdet_one", "classical vierbeins have unit superdeterminant", bad, count)


def check_quantum_reduces(rng: random.Random, count: int = 20, eps=1) -> Check:
    """At ε = 1 the quantum family equals the classical one; otherwise the
    assembled density is checked against the family the formulas realize."""
    bad = 0
    for i in range(count):
        branch = 1 + i % 2
        c, d, e, b = _random_block(rng, branch)
        s = rng.choice((1, -1))
        hb = Fraction(rng.randint(1, 4), rng.randint(1, 4))
        q = solve_quantum(c, d, e, s, eps, hb, b=b)
        if exact(eps) == 1:
            bad += not q.same_components(solve_classical(c, d, e, s, b=b))
        bad += not (q.checks["pqr_matches_sdet"] and q.checks["inverse_matches_target"])
    name = "quantum_equals_classical_at_eps_1" if exact(eps) == 1 else "quantum_family_density"
    return _exact_check(name, "quantum family reduces to the classical one at ε = 1", bad, count,
                        eps=str(exact(eps)))


def check_quantum_limit(rng: random.Random, count: int = 10, eps=Fraction(1, 10 ** 6),
                        tol: float = 1e-5) -> list:
    """Unit a_B and density ε − iθ̄θ/ħ against (1/ħ)∫dτ(½q̇² − V).

    Two checks: the exact split ``S = ε·S_CPI + S_QPI`` and the relative
    size of the ε-suppressed remainder, which is ``ε·|S_CPI|/|S_QPI|`` and so
    depends on the path.
    """
    V = PolynomialObservable.from_expr("q**2/2 + q**4/12")
    eps_r = exact_scalars().convert(exact(eps))
    worst = 0.0
    ratios = []
    bad = 0
    for _ in range(count):
        path = random_path(1, degree=3, seed=_seed(rng))
        A = action_from_vierbein(None, V, path, sdet=quantum_target(eps, 1, "exact"))
        target = qpi_weight(V, path, 1)
        classical = action_from_vierbein(None, V, path).action
        bad += not (A.soul_term == target and A.body_term == classical * eps_r)
        rel = supernorm(A.action - target) / supernorm(target)
        ratios.append(supernorm(classical) / supernorm(target))
        worst = max(worst, rel)
    return [
        _exact_check("quantum_weight_split", "S = ε·S_CPI + (1/ħ)∫dτ(½q̇² − V) exactly", bad, count),
        _numeric_check("quantum_weight_limit", "ε-suppressed term below tolerance relative to the QPI weight",
                       worst, tol, eps=str(exact(eps)), max_cpi_to_qpi_ratio=max(ratios)),
    ]


def check_metric_family(rng: random.Random, count: int = 20) -> Check:
    bad = 0
    for i in range(count):
        branch = 1 + i % 2
        c, d, e, b = _random_block(rng, branch)
        num = lambda: Fraction(rng.randint(-5, 5), rng.randint(1, 3))  # noqa: E731
        fam = classical_metric_family((num(), num()), (num(), num()), c[0], d[0], e[0],
                                      rng.choice((1, -1)), b=b[0])
        bad += not fam.pattern_ok
    return _exact_check("classical_metric_pattern", "five-parameter classical metric", bad, count)


def check_quantum_metric_singular() -> Check:
    try:
        quantum_metric(c=1, d=1, e=1, eps=0)
    except SingularOddBlock:
        return _exact_check("quantum_metric_singular", "quantum metrics are not invertible", 0, 1)
    return _exact_check("quantum_metric_singular", "quantum metrics are not invertible", 1, 1)


def check_kinetic_iff(rng: random.Random) -> Check:
    path = random_path(1, degree=3, seed=_seed(rng))
    bad = 0
    for a in (1, -1):
        bad += any(check_kinetic_constraint(VierbeinParams.build(a=a), path))
    for params in (VierbeinParams.build(alpha=(1, 0)), VierbeinParams.build(beta=(0, 2)),
                   VierbeinParams.build(a=(1, 1)), VierbeinParams.build(a=2)):
        bad += not any(check_kinetic_constraint(params, path))
    return _exact_check("kinetic_constraint", "D_τQD_τQ = ∂_τQ∂_τQ iff α = β = 0, a = ±1", bad, 6)


def check_dequantize_vs_vierbein(rng: random.Random, count: int = 5) -> Check:
    bad = 0
    V = PolynomialObservable.from_expr("q**2/2 - q**3/5")
    for _ in range(count):
        path = random_path(1, degree=3, seed=_seed(rng))
        w = dequantize_action(V, path)
        S = action_from_vierbein(None, V, path).action
        bad += w.classical_exponent != S * 1j
    return _exact_check("dequantize_matches_vierbein", "dequantized weight equals the unit-density action",
                        bad, count)


def suite_vierbein(rng: random.Random, cfg: dict, out_dir: Path | None = None) -> list:
    checks = [check_classical_sdet(rng), check_quantum_reduces(rng), *check_quantum_limit(rng),
              check_metric_family(rng), check_quantum_metric_singular(), check_kinetic_iff(rng),
              check_dequantize_vs_vierbein(rng)]
    eps = cfg.get("epsilon")
    if eps is not None and exact(eps) != 1:
        checks.append(check_quantum_reduces(rng, eps=exact(eps)))
    if out_dir is not None:
        V = PolynomialObservable.from_expr(cfg.get("potential", "q**2/2"))
        path = random_path(1, degree=int(cfg.get("path_degree", 3)), seed=_seed(rng))
        epsilons = cfg.get("epsilons") or DEFAULT_EPSILONS
        rows = epsilon_sweep(V, path, [exact(x) for x in epsilons], hbar=exact(cfg.get("hbar", 1)))
        sweep_to_csv(rows, Path(out_dir) / "epsilon_sweep.csv")
    return checks


RUNNERS = {
    "algebra": suite_algebra,
    "supergeometry": suite_supergeometry,
    "dynamics": suite_dynamics,
    "superfield": suite_superfield,
    "kvn": suite_kvn,
    "kernels": suite_kernels,
    "vierbein": suite_vierbein,
}
WRITES_ARTIFACTS = {"kvn", "kernels", "vierbein"}
