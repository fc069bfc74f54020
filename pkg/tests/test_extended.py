import math
import random

import numpy as np
import pytest

from superkvn import suites
from superkvn.errors import DimensionMismatch
from superkvn.extended import (ExtendedPoint, ExtendedSpace, build_charge, build_superhamiltonian,
                               equations_of_motion_check, extended_flow, extended_poisson_bracket)
from superkvn.phase_flow import PolynomialObservable, poisson_bracket

P = PolynomialObservable.from_expr
HO = P("(p**2 + q**2)/2")
sp = ExtendedSpace(1)
I = sp.constant(1j)
q, p = sp.phi(0), sp.phi(1)
lq, lp = sp.lam(0), sp.lam(1)
cq, cp = sp.c(0), sp.c(1)
cbq, cbp = sp.cb(0), sp.cb(1)


def test_basic_brackets():
    for a in range(2):
        for b in range(2):
            assert extended_poisson_bracket(sp.phi(a), sp.lam(b)) == sp.constant(int(a == b))
            assert not extended_poisson_bracket(sp.phi(a), sp.phi(b))
    assert extended_poisson_bracket(cbq, cq) == -I


def test_bracket_space_mismatch():
    with pytest.raises(DimensionMismatch):
        extended_poisson_bracket(sp.phi(0), ExtendedSpace(2).phi(0))


def test_superhamiltonian_oscillator():
    expect = lq * p - lp * q + I * cbq * cp - I * cbp * cq
    assert build_superhamiltonian(HO) == expect
    assert not build_superhamiltonian(P("0"))
    assert build_superhamiltonian(P("p**2/2")) == lq * p + I * cbq * cp


def test_charges():
    assert build_charge("N", HO) == cq * q + cp * p
    assert build_charge("Q", n=1) == I * cq * lq + I * cp * lp
    assert build_charge("Q_H", P("0")) == build_charge("Q", n=1)
    with pytest.raises(ValueError):
        build_charge("Q_H")


def test_lifted_bracket_reproduces_poisson():
    f, g = P("q**3 + p*q"), P("p**2 - q")
    # {F, λ G ...}: on the φ sector the epb of the lifted ℋ_f with g recovers {g, f}
    lhs = extended_poisson_bracket(sp.lift(g), build_superhamiltonian(f))
    assert lhs == sp.lift(poisson_bracket(g, f))


def test_susy_and_conservation_suites():
    rng = random.Random(11)
    assert suites.check_susy_algebra(rng, 4).passed
    assert suites.check_conservation(rng, 4).passed


def test_oscillator_ghost_rotation():
    t = 0.7
    r = extended_flow(HO, ExtendedPoint(np.array([1.0, 0.0]), np.zeros(2)), t, 1e-12)
    rot = np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]])
    assert np.allclose(r.J, rot, atol=1e-10)


def test_zero_time_transports():
    r = extended_flow(P("q**4 + p**2"), ExtendedPoint(np.array([0.2, 0.1]), np.array([1.0, 2.0])), 0.0)
    assert np.array_equal(r.J, np.eye(2)) and np.array_equal(r.K, np.eye(2))


def test_free_lambda_line():
    lam0 = np.array([0.3, -1.1])
    t = 1.5
    r = extended_flow(P("p**2/2"), ExtendedPoint(np.array([0.0, 1.0]), lam0), t, 1e-12)
    assert np.allclose(r.lam_body, [lam0[0], lam0[1] - lam0[0] * t], atol=1e-10)


def test_ghost_equals_jacobi():
    assert suites.check_ghost_jacobi().passed


def test_equations_of_motion_signs():
    rep = equations_of_motion_check(P("p**2/2 + q**4/4"), ExtendedPoint(np.array([0.4, 0.1]), np.array([0.2, 0.3])), 0.5)
    assert all(v["sign"] == 1 for v in rep.values())
    assert max(v["residual"] for v in rep.values()) < 1e-8


def test_point_shape_checked():
    with pytest.raises(DimensionMismatch):
        ExtendedPoint(np.zeros(2), np.zeros(3))
