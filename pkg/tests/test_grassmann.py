from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superkvn.errors import AlgebraMismatch, NoInverse, NotNilpotent, UnknownGenerator
from superkvn.grassmann import (GrassmannAlgebra, berezin_integrate, body_soul, invert, left_derivative,
                                multiply, nilpotent_exp, right_derivative)
from superkvn.rings import exact_scalars

A = GrassmannAlgebra(["theta", "thetabar"])
th, thb = A.gens()
I = A.ring.convert(1j)


def test_nilpotent_and_anticommuting():
    assert th * th == A.zero
    assert thb * th == -(th * thb)
    assert multiply(th, thb) == A.monomial(["theta", "thetabar"])


def test_distributive_expansion():
    assert (1 + th) * (1 + thb) == 1 + th + thb + th * thb


def test_monomial_sorted_with_sign():
    assert A.monomial(["thetabar", "theta"]) == -(th * thb)
    assert A.monomial(["theta", "theta"]) == A.zero


def test_mismatched_algebras():
    B = GrassmannAlgebra(["a", "b"])
    with pytest.raises(AlgebraMismatch):
        multiply(th, B.gen("a"))


def test_duplicate_labels_rejected():
    with pytest.raises(ValueError):
        GrassmannAlgebra(["x", "x"])


def test_berezin_normalization():
    assert berezin_integrate(thb * th, ["theta", "thetabar"]) == A.one
    assert berezin_integrate(A.one, ["theta", "thetabar"]) == A.zero


def test_berezin_of_multiplet():
    H, N, Nb, Hs = (A.scalar(x) for x in (3, 5, 7, 11))
    x = H + th * N + Nb * thb - I * thb * th * Hs
    assert berezin_integrate(x, ["theta", "thetabar"]) == -I * Hs


def test_berezin_unknown_label():
    with pytest.raises(UnknownGenerator):
        berezin_integrate(th, ["eta"])


def test_left_derivative():
    assert left_derivative(th * thb, "theta") == thb
    assert left_derivative(thb * th, "theta") == -thb
    assert left_derivative(A.one, "theta") == A.zero
    assert right_derivative(th * thb, "thetabar") == th
    with pytest.raises(UnknownGenerator):
        left_derivative(th, "eta")


def test_invert_regulated_density():
    eps, hbar = Fraction(1, 3), Fraction(2)
    x = eps - I * thb * th / hbar
    expect = 1 / eps + I * thb * th / (eps * eps * hbar)
    assert invert(x) == expect
    assert invert(x) * x == A.one
    assert invert(A.one) == A.one


def test_invert_zero_body():
    with pytest.raises(NoInverse):
        invert(-I * thb * th)


def test_nilpotent_exp():
    assert nilpotent_exp(th * thb) == 1 + th * thb
    G = GrassmannAlgebra(["c", "cb"])
    c, cb = G.gens()
    assert nilpotent_exp(cb * c) * nilpotent_exp(-(cb * c)) == G.one


def test_nilpotent_exp_body_needs_exact_exp():
    # QQ_I has no exp of a nonzero rational
    with pytest.raises(NotNilpotent):
        nilpotent_exp(A.scalar(1) + th * thb)


def test_body_soul():
    b = A.scalar(Fraction(3, 2)) + 5 * thb * th
    body, soul = body_soul(b)
    assert body == A.ring.convert(Fraction(3, 2))
    assert soul == 5 * thb * th
    assert body_soul(A.zero) == (A.ring.zero, A.zero)
    assert body_soul(th) == (A.ring.zero, th)


def test_parity_queries():
    assert (th * thb).is_even()
    assert th.is_odd()
    mixed = 1 + th
    assert not mixed.is_even() and not mixed.is_odd()
    assert mixed.even_part() == A.one and mixed.odd_part() == th


def test_no_stored_zeros():
    x = th + thb - th
    assert x.terms == thb.terms


# ---------------------------------------------------------------------------
# properties over a four-generator algebra

G4 = GrassmannAlgebra(["a", "b", "c", "d"], exact_scalars())
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
supernumbers = st.dictionaries(st.integers(0, 15), coeff, max_size=8).map(G4.element)


@settings(max_examples=60, deadline=None)
@given(supernumbers, supernumbers, supernumbers)
def test_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y) * z == x * z + y * z


@settings(max_examples=60, deadline=None)
@given(supernumbers, supernumbers)
def test_graded_commutativity(x, y):
    # even parts are central; odd parts anticommute
    xe, xo, ye, yo = x.even_part(), x.odd_part(), y.even_part(), y.odd_part()
    assert xe * y == y * xe
    assert xo * yo == -(yo * xo)


@settings(max_examples=60, deadline=None)
@given(supernumbers)
def test_inverse_roundtrip(x):
    if not x.body():
        with pytest.raises(NoInverse):
            invert(x)
    else:
        assert invert(x) * x == G4.one


@settings(max_examples=40, deadline=None)
@given(supernumbers, supernumbers)
def test_left_derivative_leibniz(x, y):
    # ∂(xy) = (∂x)y + (−1)^|x| x ∂y for homogeneous x
    for part, sign in ((x.even_part(), 1), (x.odd_part(), -1)):
        lhs = left_derivative(part * y, "b")
        rhs = left_derivative(part, "b") * y + sign * part * left_derivative(y, "b")
        assert lhs == rhs
