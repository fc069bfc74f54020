import math

import numpy as np
import pytest

from superkvn.errors import DimensionMismatch, SupportEscape
from superkvn.kvn import (GridSpec, KvNWave, closed_form_free, closed_form_oscillator, cpi_kernel_compose,
                          density_consistency, evolve_density, evolve_form, evolve_wave, form_pairing_invariance,
                          gaussian_blob, uniform_slices)
from superkvn.phase_flow import PolynomialObservable, hamilton_flow

P = PolynomialObservable.from_expr
HO = P("(p**2 + q**2)/2")
FREE = P("p**2/2")
GRID = GridSpec(-6, 6, 128, -6, 6, 128)


def test_zero_time_is_identity():
    psi0 = KvNWave.from_function(GRID, gaussian_blob())
    assert np.array_equal(evolve_wave(HO, psi0, 0.0).values, psi0.values)


def test_free_shear_separable():
    g = lambda Q: np.exp(-2 * (Q - 0.5) ** 2)  # noqa: E731
    h = lambda Pm: np.exp(-3 * Pm ** 2) * (1 + 0.3j * Pm)  # noqa: E731
    psi0 = KvNWave.from_function(GRID, lambda Q, Pm: g(Q) * h(Pm))
    t = 0.8
    out = evolve_wave(FREE, psi0, t)
    ref = KvNWave.from_function(GRID, lambda Q, Pm: g(Q - Pm * t) * h(Pm))
    assert np.max(np.abs(out.values - ref.values)) < 5e-3


def test_oscillator_quarter_turn_moves_blob():
    psi0 = KvNWave.from_function(GRID, gaussian_blob())
    out = evolve_wave(HO, psi0, math.pi / 2)
    i, j = np.unravel_index(np.argmax(np.abs(out.values)), out.values.shape)
    q, p = GRID.axes()
    assert abs(q[i]) < GRID.dq and abs(p[j] + 1) < GRID.dp
    ref = KvNWave.from_function(GRID, closed_form_oscillator(gaussian_blob(), math.pi / 2))
    assert np.max(np.abs(out.values - ref.values)) < 1e-3


def test_multistep_matches_closed_form():
    grid = GridSpec(-6, 6, 128, -6, 6, 128, dt=0.25)
    psi0 = KvNWave.from_function(grid, gaussian_blob())
    ref = KvNWave.from_function(grid, closed_form_oscillator(gaussian_blob(), 1.0))
    out = evolve_wave(HO, psi0, 1.0)
    assert grid.steps_for(1.0) == 4
    assert np.max(np.abs(out.values - ref.values)) < 2e-2


def test_support_escape():
    psi0 = KvNWave.from_function(GRID, gaussian_blob(center=(4.0, 0.0)))
    with pytest.raises(SupportEscape):
        evolve_wave(FREE, KvNWave.from_function(GRID, gaussian_blob(center=(4.0, 3.0))), 2.0)
    with pytest.raises(SupportEscape):
        evolve_wave(P("p**2/2 - q**2/2"), psi0, 2.0)


def test_courant_limit():
    grid = GridSpec(-6, 6, 16, -6, 6, 16, dt=50.0)
    psi0 = KvNWave.from_function(grid, gaussian_blob())
    with pytest.raises(ValueError):
        evolve_wave(HO, psi0, 50.0)


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        KvNWave(GRID, np.zeros((4, 4)))
    with pytest.raises(DimensionMismatch):
        evolve_wave(PolynomialObservable.from_expr("p1**2", 2), KvNWave(GRID, np.zeros((128, 128))), 1.0)


def test_bad_grids():
    with pytest.raises(ValueError):
        GridSpec(nq=4)
    with pytest.raises(ValueError):
        GridSpec(qmin=1, qmax=0)
    with pytest.raises(ValueError):
        GridSpec(dt=-1)


def test_density_consistency_free():
    psi0 = KvNWave.from_function(GRID, gaussian_blob(momentum=1.0))
    rep = density_consistency(FREE, psi0, 1.0)
    assert rep.relative_discrepancy < 1e-2
    assert rep.l1_drift < 1e-3


def test_real_nonnegative_wave():
    psi0 = KvNWave.from_function(GRID, gaussian_blob())
    psi = evolve_wave(HO, psi0, 1.3)
    rho = evolve_density(HO, psi0.values.real, GRID, 1.3)
    assert np.allclose(psi.values.real, rho)


def test_norms_over_quarter_period():
    psi0 = KvNWave.from_function(GridSpec(), gaussian_blob())
    rep = density_consistency(HO, psi0, math.pi / 2)
    assert rep.l1_drift < 1e-3 and rep.l2_drift < 1e-3


def test_zero_form_is_liouville_transport():
    F0 = P("q**2 + p")
    pts = np.stack([np.array([0.3, -1.0]), np.array([0.5, 0.2])])
    t = 0.9
    out = evolve_form(HO, F0, None, pts, t)
    back = closed_form_oscillator(lambda Q, Pm: Q ** 2 + Pm, t)(pts[0], pts[1])
    assert np.allclose(out.zero_form, back, atol=1e-8)


def test_one_form_rotates():
    # F = q c^q; pulled back by the inverse rotation
    t = 0.6
    pts = np.array([[0.7], [0.1]])
    out = evolve_form(HO, None, [P("q"), P("0")], pts, t, tol=1e-12)
    c, s = math.cos(t), math.sin(t)
    qb = pts[0, 0] * c - pts[1, 0] * s
    assert np.allclose(out.one_form[:, 0], [qb * c, -qb * s], atol=1e-9)


def test_form_pairing_invariance():
    F1 = [P("q*p"), P("q**2 + 1")]
    assert form_pairing_invariance(P("p**2/2 + q**4/4"), F1, [0.6, -0.3], 1.5, tol=1e-12) < 1e-8


def test_form_dimension_check():
    with pytest.raises(DimensionMismatch):
        evolve_form(HO, P("q"), None, np.zeros((3, 2)), 1.0)
    with pytest.raises(DimensionMismatch):
        evolve_form(HO, None, [P("q")], np.zeros((2, 2)), 1.0)


def test_compose_two_slices():
    res = cpi_kernel_compose(HO, [1.0, 0.2], [0.0, 0.4, 1.0], tol=1e-12)
    assert res.discrepancy < 1e-9


def test_compose_zero_slices():
    res = cpi_kernel_compose(HO, [1.0, 0.2], [0.0, 0.0, 0.0])
    assert np.array_equal(res.chained, [1.0, 0.2])


def test_compose_quartic_64():
    H = P("p**2/2 + q**4/4")
    res = cpi_kernel_compose(H, [0.5, 0.5], uniform_slices(2.0, 64), tol=1e-12)
    assert res.discrepancy < 1e-7


def test_compose_rejects_unsorted():
    with pytest.raises(ValueError):
        cpi_kernel_compose(HO, [1.0, 0.0], [0.0, 1.0, 0.5])


def test_csv_snapshot(tmp_path):
    grid = GridSpec(-1, 1, 8, -1, 1, 8)
    psi = KvNWave.from_function(grid, gaussian_blob())
    path = psi.to_csv(tmp_path / "w.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "q,p,re_psi,im_psi,rho"
    assert len(lines) == 65


def test_free_closed_form_helper():
    f = closed_form_free(lambda Q, Pm: Q, 2.0)
    assert f(1.0, 0.5) == 0.0
    assert np.allclose(hamilton_flow(FREE, [0.0, 0.5], 2.0).endpoint.phi, [1.0, 0.5])
