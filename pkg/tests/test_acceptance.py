"""Acceptance criteria at their stated tolerances, one PASS/FAIL line each.

The vierbein criterion is split in two.  Its exact parts pass; the relative
bound on the ε → 0 limit is not met for general polynomial paths and stays
a strict xfail that prints its measured residual.
"""

import random

import pytest

from superkvn import suites
from superkvn.kvn import GridSpec

SEED = 20240917


def _rng(k):
    return random.Random(SEED + k)


def _summary(checks):
    return "; ".join(f"{c.name}={c.residual:.3g}" for c in checks)


def test_multiplet_identity(criterion):
    c = suites.check_multiplet_identity(_rng(1), count=20)
    assert criterion("i∫dθdθ̄ H[Φ] = ℋ, 20 random H, n ∈ {1,2}, deg ≤ 4", c.passed, _summary([c]))


def test_susy_algebra_and_conservation(criterion):
    rng = _rng(2)
    susy = suites.check_susy_algebra(rng, count=12)
    cons = suites.check_conservation(rng, count=12)
    ok = susy.passed and cons.passed and len(susy.detail["kappa"]) == 1
    assert criterion("{Q_H, Q̄_H} = κ_s ℋ (single κ_s); {ℋ, X} = 0", ok,
                     f"kappa_s={susy.detail['kappa']}; {_summary([susy, cons])}")


def test_lagrangian_and_surface_terms(criterion):
    rng = _rng(3)
    lag = suites.check_lagrangian_identity(rng, count=50)
    surf = suites.check_surface_cancellation(rng, count=50)
    assert criterion("Lagrangian identity (50 paths); surface cancellation = 1 (50 sets)",
                     lag.passed and surf.passed, _summary([lag, surf]))


def test_superfield_bracket(criterion):
    c = suites.check_superfield_bracket()
    assert criterion("{Φ^a(θ), Φ^b(θ′)} = −iω^{ab}(θ̄−θ̄′)(θ−θ′)", c.passed, _summary([c]))


def test_osp_invariance(criterion):
    c = suites.check_osp_invariance()
    assert criterion("X_i(t² − 2θ̄θ) = 0 for five generators", c.passed, _summary([c]))


def test_ghost_is_jacobi(criterion):
    c = suites.check_ghost_jacobi(tol=1e-8)
    assert criterion("c-transport = Jacobi, JᵀωJ = ω (tol 1e-8)", c.passed,
                     f"jacobi={c.detail['jacobi_error']:.3g}; symplectic={c.detail['symplectic_error']:.3g}")


def test_kvn_evolution(criterion):
    grid = GridSpec(-6, 6, 256, -6, 6, 256)
    checks = suites.check_kvn_closed_forms(grid, 1e-3) + suites.check_kvn_norms(grid, 1e-3)
    assert criterion("KvN closed forms, L¹/L² norms, ρ = |ψ|² (256², tol 1e-3)",
                     all(c.passed for c in checks), _summary(checks))


def test_qpi_oracle(criterion):
    checks = (suites.check_oscillator_kernel(4096, 1e-3) + [suites.check_free_kernel(_rng(8), 1e-12)]
              + [suites.check_kernel_convergence((512, 1024, 2048))])
    ratios = checks[-1].detail["ratios"]
    assert criterion("HO vs Mehler (N=4096, 1e-3); free exact (1e-12); error halves",
                     all(c.passed for c in checks), f"{_summary(checks)}; ratios={[round(r, 4) for r in ratios]}")


def test_vierbein_families_exact(criterion):
    rng = _rng(9)
    checks = [suites.check_classical_sdet(rng, 40), suites.check_quantum_reduces(rng, 20, eps=1),
              suites.check_metric_family(rng, 20)]
    split = suites.check_quantum_limit(rng, 10)[0]
    checks.append(split)
    assert criterion("sdet = 1; quantum(ε=1) ≡ classical; metric pattern; ε-split exact",
                     all(c.passed for c in checks), _summary(checks))


@pytest.mark.xfail(strict=True, reason="relative 1e-5 bound at ε = 1e-6 does not hold for general "
                                       "polynomial paths: the remainder is exactly ε·S_CPI and |S_CPI|/|S_QPI| "
                                       "is unbounded over paths")
def test_vierbein_quantum_limit_relative(criterion):
    limit = suites.check_quantum_limit(_rng(9), 10)[1]
    assert criterion("action(E = ε − iθ̄θ/ħ, ε=1e-6) vs QPI weight, relative 1e-5", limit.passed,
                     f"rel={limit.residual:.3g}; max |S_CPI|/|S_QPI|={limit.detail['max_cpi_to_qpi_ratio']:.4g}")


def test_cross_module_coherence(criterion):
    rng = _rng(10)
    checks = [suites.check_multiplet_charges(rng, 10), suites.check_susy_conjugation(rng, 10),
              suites.check_dequantize_vs_vierbein(rng, 10)]
    assert criterion("compose ≡ build_*; conjugation ≡ compose; dequantize ≡ vierbein action",
                     all(c.passed for c in checks), _summary(checks))
