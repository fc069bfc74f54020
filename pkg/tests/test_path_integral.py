import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superkvn.errors import CausticError
from superkvn.path_integral import (DiscretizedAction, QuadraticPotential, classical_path, free_kernel,
                                    kernel_compare, kernel_convergence, mehler_group_check, mehler_oracle,
                                    qpi_kernel_details, qpi_kernel_quadratic)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3000), st.floats(0.05, 5.0), st.floats(0.2, 4.0), st.floats(0.2, 3.0),
       st.floats(-3, 3), st.floats(-3, 3))
def test_free_kernel_exact_for_any_slicing(N, t, m, hbar, q0, q1):
    K = qpi_kernel_quadratic(DiscretizedAction.free(N, t, m, hbar), q0, q1)
    ref = free_kernel(m, hbar, t, q0, q1)
    assert abs(K - ref) / abs(ref) <= 1e-12 * max(1.0, m * (q1 - q0) ** 2 / (hbar * t))


def test_free_kernel_closed_form():
    # √(m/(2πiħt)) e^{im(q1−q0)²/(2ħt)}
    m, hbar, t, q0, q1 = 2.0, 0.5, 1.3, 0.2, -0.7
    ref = np.sqrt(m / (2j * math.pi * hbar * t)) * np.exp(1j * m * (q1 - q0) ** 2 / (2 * hbar * t))
    assert abs(free_kernel(m, hbar, t, q0, q1) - ref) < 1e-14


def test_oscillator_against_mehler():
    rep = kernel_compare(DiscretizedAction.harmonic(4096, 1.0))
    assert rep.max_modulus_error <= 1e-3
    assert rep.max_phase_error <= 1e-3


def test_zero_endpoints_are_prefactor_only():
    spec = DiscretizedAction.harmonic(1024, 1.0)
    d = qpi_kernel_details(spec, 0.0, 0.0)
    assert d.action == 0.0
    ref = mehler_oracle(1, 1, 1, 1.0, 0, 0)
    assert abs(np.angle(d.amplitude / ref)) < 1e-12


def test_error_halves_per_doubling():
    conv = kernel_convergence(DiscretizedAction.harmonic(512, 1.0), (512, 1024, 2048))
    assert conv.monotone
    assert all(abs(r - 2) < 0.1 for r in conv.ratios)
    assert abs(conv.order - 1) < 0.05


def test_zero_frequency_is_free():
    spec = DiscretizedAction(64, 0.9, 1.0, 1.0, QuadraticPotential(v2=0.0))
    assert abs(qpi_kernel_quadratic(spec, 0.3, 1.1) - free_kernel(1, 1, 0.9, 0.3, 1.1)) < 1e-13
    assert mehler_oracle(1, 0, 1, 0.9, 0.3, 1.1) == free_kernel(1, 1, 0.9, 0.3, 1.1)


def test_small_omega_limit():
    a = mehler_oracle(1, 1e-5, 1, 0.7, 0.2, 0.4)
    b = free_kernel(1, 1, 0.7, 0.2, 0.4)
    assert abs(a - b) / abs(b) < 1e-8


def test_short_time_width():
    # |K| ∝ t^{-1/2} and the phase curvature is m/(ħt)
    for t in (1e-3, 4e-3):
        k0 = mehler_oracle(1, 1, 1, t, 0, 0)
        assert abs(abs(k0) - math.sqrt(1 / (2 * math.pi * t))) / abs(k0) < 1e-5


def test_group_property():
    for t1, t2 in ((0.4, 0.7), (1.2, 1.5), (2.0, 2.5)):
        assert mehler_group_check(1, 1, 1, t1, t2, 0.3, -0.5) < 1e-4


def test_oracle_caustic():
    with pytest.raises(CausticError) as err:
        mehler_oracle(1, 1, 1, math.pi, 0, 0)
    assert err.value.time == pytest.approx(math.pi)


def test_discrete_caustic_reports_time():
    spec = DiscretizedAction.harmonic(64, 4.0)
    with pytest.raises(CausticError) as err:
        qpi_kernel_quadratic(spec, 0.0, 0.0)
    assert abs(err.value.time - math.pi) < 0.2


def test_past_focal_point_oracle_phase():
    # Maslov phase: each half period adds −π/2
    a = mehler_oracle(1, 1, 1, 1.0, 0, 0)
    b = mehler_oracle(1, 1, 1, 1.0 + math.pi, 0, 0)
    assert np.angle(b / a) == pytest.approx(-math.pi / 2)


def test_classical_path_endpoints_and_stationarity():
    spec = DiscretizedAction.harmonic(50, 1.0)
    x = classical_path(spec, 0.2, -0.4)
    assert x[0] == 0.2 and x[-1] == -0.4
    h = 1e-6
    for k in (1, 25, 48):
        e = np.zeros_like(x)
        e[k] = h
        dS = (spec.discrete_action(x + e) - spec.discrete_action(x - e)) / (2 * h)
        assert abs(dS) < 1e-7


def test_spec_validation():
    with pytest.raises(ValueError):
        DiscretizedAction(1, 1.0)
    with pytest.raises(ValueError):
        DiscretizedAction(4, 0.0)
    with pytest.raises(ValueError):
        DiscretizedAction(4, 1.0, hbar=0.0)
    with pytest.raises(ValueError):
        kernel_compare(DiscretizedAction(4, 1.0, potential=QuadraticPotential(v1=1.0)))


def test_kernel_table_csv(tmp_path):
    rep = kernel_compare(DiscretizedAction.harmonic(128, 1.0))
    lines = rep.to_csv(tmp_path / "k.csv").read_text().splitlines()
    assert lines[0] == "q0,q1,abs_k_discrete,abs_k_oracle,rel_error"
    assert len(lines) == 26
