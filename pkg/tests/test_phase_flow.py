import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superkvn.errors import DimensionMismatch, IntegrationFailure
from superkvn.integrate import dopri45
from superkvn.phase_flow import (PolynomialObservable, hamilton_flow, liouvillian_coefficients, omega,
                                 poisson_bracket, random_polynomial)

P = PolynomialObservable.from_expr
HO = P("(p**2 + q**2)/2")


def test_canonical_bracket():
    assert poisson_bracket(P("q"), P("p")) == P("1")
    assert poisson_bracket(P("p"), P("q")) == P("-1")
    assert poisson_bracket(P("q**2"), P("p")) == P("2*q")
    assert not poisson_bracket(HO, HO)


def test_bracket_n2_omega():
    n = 2
    coords = [PolynomialObservable.coordinate(a, n) for a in range(2 * n)]
    w = omega(n)
    for a in range(4):
        for b in range(4):
            assert poisson_bracket(coords[a], coords[b]) == PolynomialObservable.constant(int(w[a, b]), n)


def test_bracket_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        poisson_bracket(P("q"), PolynomialObservable.coordinate(0, 2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_bracket_jacobi_identity(seed):
    rng = random.Random(seed)
    f, g, h = (random_polynomial(1, 3, rng, terms=3) for _ in range(3))
    total = (poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f))
             + poisson_bracket(h, poisson_bracket(f, g)))
    assert not total


def test_liouvillian_coefficients():
    assert liouvillian_coefficients(HO) == (P("p"), P("-q"))
    assert liouvillian_coefficients(P("p**2/2")) == (P("p"), P("0"))
    assert all(not f for f in liouvillian_coefficients(P("0")))


def test_oscillator_quarter_turn():
    r = hamilton_flow(HO, [1.0, 0.0], math.pi / 2, 1e-12)
    assert np.allclose(r.endpoint.phi, [0.0, -1.0], atol=1e-10)
    assert np.allclose(r.jacobi, [[0, 1], [-1, 0]], atol=1e-9)


def test_free_drift():
    r = hamilton_flow(P("p**2/2"), [1.0, 2.0], 0.5)
    assert np.allclose(r.endpoint.phi, [2.0, 2.0], atol=1e-12)


def test_zero_time_identity():
    r = hamilton_flow(P("p**4 + q**3"), [0.3, -0.2], 0.0)
    assert np.array_equal(r.endpoint.phi, [0.3, -0.2])
    assert np.array_equal(r.jacobi, np.eye(2))


def test_energy_and_symplecticity():
    H = P("p**2/2 + q**4/4 - q**2/2")
    r = hamilton_flow(H, [0.1, 0.5], 7.0, 1e-12)
    assert abs(H(r.endpoint.phi) - H(np.array([0.1, 0.5]))) < 1e-9
    w = omega(1)
    assert np.max(np.abs(r.jacobi.T @ w @ r.jacobi - w)) < 1e-8


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_blowup_raises():
    with pytest.raises(IntegrationFailure):
        hamilton_flow(P("p**2/2 - q**4"), [1.0, 1.0], 10.0)


def test_dopri_exponential():
    y, stats = dopri45(lambda t, y: -y, np.array([1.0]), 0.0, 2.0, 1e-12)
    assert abs(y[0] - math.exp(-2.0)) < 1e-10
    assert stats.accepted > 0


def test_random_polynomial_degree():
    rng = random.Random(4)
    for _ in range(10):
        f = random_polynomial(2, 4, rng)
        assert f.degree() <= 4 and f.n == 2
