import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superkvn import suites
from superkvn.errors import DimensionMismatch
from superkvn.extended import build_superhamiltonian
from superkvn.grassmann import berezin_integrate
from superkvn.phase_flow import PolynomialObservable
from superkvn.superfield import (THETA_LABELS, EndpointData, Superfield, action_multiplet_expansion,
                                 build_superfield, compose_by_substitution, compose_observable, dequantize_action,
                                 lagrangian_identity_check, random_path, superfield_bracket_check,
                                 surface_term_cancellation, susy_conjugation, to_extended)

P = PolynomialObservable.from_expr
HO = P("(p**2 + q**2)/2")
Phi = Superfield.symbolic(1)
alg = Phi.algebra
ring = alg.ring
th, thb = alg.gen("theta"), alg.gen("thetabar")
I = ring.convert(1j)
q, p, lq, lp = (alg.scalar(ring.gen(x)) for x in ("q", "p", "lam_q", "lam_p"))
cq, cp, cbq, cbp = (alg.gen(x) for x in ("c_q", "c_p", "cb_q", "cb_p"))


def test_bosonic_superfield_is_phi():
    S = build_superfield([2, 3])
    assert S[0] == S.algebra.scalar(2) and S[1] == S.algebra.scalar(3)


def test_component_layout():
    assert Phi[0] == q + th * cq + thb * cbp + thb * th * lp * I
    assert Phi[1] == p + th * cp - thb * cbq - thb * th * lq * I


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        build_superfield([1, 2, 3])
    with pytest.raises(DimensionMismatch):
        build_superfield([1, 2], lam=[1])


def test_compose_oscillator_hand_expansion():
    inner = lq * p - lp * q + I * cbq * cp - I * cbp * cq
    expect = (q * q + p * p) / 2 + th * (cq * q + cp * p) + (cbq * p - cbp * q) * thb - I * thb * th * inner
    assert compose_observable(HO, Phi) == expect


def test_compose_constant():
    assert compose_observable(P("7"), Phi) == alg.scalar(7)


def test_berezin_of_composition_is_superhamiltonian():
    lhs = berezin_integrate(compose_observable(HO, Phi), THETA_LABELS) * 1j
    assert to_extended(lhs, Phi.space) == build_superhamiltonian(HO)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_two_composition_routes_agree(seed):
    H = suites.random_hamiltonians(random.Random(seed), 1, degree=4)[0]
    S = Superfield.symbolic(H.n)
    assert compose_observable(H, S) == compose_by_substitution(H, S)


def test_susy_conjugation():
    assert alg.convert(susy_conjugation(P("q"))) == Phi[0]
    assert alg.convert(susy_conjugation(P("q**2"))) == Phi[0] * Phi[0]
    zero = susy_conjugation(HO, theta=0, thetabar=0)
    assert zero == zero.algebra.scalar(zero.algebra.ring.convert(HO.poly))


def test_superfield_bracket():
    for n in (1, 2):
        assert all(superfield_bracket_check(n).values())


def test_lagrangian_identity_cases():
    for expr in ("(p**2 + q**2)/2", "p**2/2 + q**4"):
        assert lagrangian_identity_check(P(expr), random_path(1, 3, seed=5)).passed
    const = random_path(1, 0, seed=2)
    assert lagrangian_identity_check(P("0"), const).passed


def test_action_expansion():
    exp = action_multiplet_expansion(HO, random_path(1, 3, seed=9))
    assert all(exp.checks().values())


def test_surface_terms_cancel():
    for seed in range(10):
        for n in (1, 2):
            out = surface_term_cancellation(EndpointData.random(n, seed))
            assert out == out.algebra.one
    ghosts_only = surface_term_cancellation(EndpointData.random(1, 0, zero_bosons=True))
    assert ghosts_only == ghosts_only.algebra.one


def test_dequantization():
    path = random_path(1, 3, seed=4)
    for V in ("0", "q**2/2", "q**3 - q"):
        w = dequantize_action(P(V), path, hbar=Fraction(3, 2))
        assert all(w.checks().values()), V


def test_dequantization_rejects_momentum():
    with pytest.raises(ValueError):
        dequantize_action(P("p*q"), random_path(1, 2, seed=1))


def test_suite_level_identities():
    rng = random.Random(0)
    assert suites.check_lagrangian_identity(rng, 6).passed
    assert suites.check_multiplet_charges(rng, 2).passed
