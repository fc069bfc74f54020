import random
from fractions import Fraction

import pytest

from superkvn import suites
from superkvn.errors import SingularOddBlock
from superkvn.supergeometry import (ETA, OSP12_GENERATORS, SuperMatrix, SupertimeFunction, anticommutator,
                                    apply_operator, metric_from_vierbein, osp_invariant, superdeterminant,
                                    supertime_algebra)

alg = supertime_algebra()
th, thb = alg.gens()


def block_diag(a, b, c, d, e):
    return SuperMatrix([[a, 0, 0], [0, b, c], [0, d, e]], alg)


def test_identity_sdet():
    assert superdeterminant(SuperMatrix.identity(alg)) == alg.one


def test_block_diag_sdet():
    assert superdeterminant(block_diag(1, 1, 0, 0, 1)) == alg.one
    assert superdeterminant(block_diag(2, 1, 0, 0, 2)) == alg.one
    assert superdeterminant(block_diag(-1, 0, 1, 1, 0)) == alg.one
    assert superdeterminant(block_diag(3, 1, 0, 0, 1)) == alg.scalar(3)


def test_sdet_with_odd_entries():
    # sdet = (a − B D⁻¹ C)/det D, hand-expanded for D = 1
    M = SuperMatrix([[2, th, 0], [thb, 1, 0], [0, 0, 1]], alg)
    assert superdeterminant(M) == 2 - th * thb


def test_singular_odd_block():
    with pytest.raises(SingularOddBlock):
        superdeterminant(block_diag(1, 0, 0, 0, 0))


def test_grading_enforced():
    with pytest.raises(ValueError):
        SuperMatrix([[th, 0, 0], [0, 1, 0], [0, 0, 1]], alg)


def test_inverse_roundtrip():
    M = SuperMatrix([[2, th, thb], [thb, 1, 3], [th, 0, 1 + th * thb]], alg)
    assert M @ M.inverse() == SuperMatrix.identity(alg)


def test_flat_metric():
    g = metric_from_vierbein(SuperMatrix.identity(alg))
    assert all(g[i, j] == alg.scalar(ETA[i][j]) for i in range(3) for j in range(3))


def test_sdet_multiplicative():
    assert suites.check_sdet_multiplicative(random.Random(1), 12).passed


def test_osp_invariance_each_generator():
    F = osp_invariant()
    for name in OSP12_GENERATORS:
        assert not apply_operator(name, F), name


def test_generators_act_nontrivially():
    f = SupertimeFunction.from_expr(lambda t, th_, thb_: t * th_ + thb_)
    assert any(apply_operator(x, f) for x in OSP12_GENERATORS)


def test_x1_ignores_t():
    f = SupertimeFunction.from_expr(lambda t, th_, thb_: t * t * th_.algebra.one)
    assert not apply_operator("X1", f)


def test_unknown_operator():
    with pytest.raises(KeyError):
        apply_operator("X9", osp_invariant())


def test_omega_anticommutator():
    f = SupertimeFunction.from_expr(lambda t, a, b: t ** 3 + t * a + 3 * b + t * t * (b * a))
    lhs = anticommutator("Omega_H", "Omegabar_H", f)
    assert lhs == apply_operator("d_t", f) * -2
    assert not anticommutator("Omega_H", "Omega_H", f)


def test_random_even_supermatrices_rational():
    rng = random.Random(3)
    M = SuperMatrix([[Fraction(rng.randint(1, 5)), th, thb], [thb, 2, 1], [th, 1, 1]], alg)
    N = M.inverse()
    assert superdeterminant(N) * superdeterminant(M) == alg.one
