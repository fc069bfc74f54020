import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from superkvn import _pykernels, kernels

BACKENDS = kernels.backends()
NAMES = sorted(BACKENDS)


def test_compiled_backend_present():
    # the package ships the extension; a missing build falls back silently
    assert kernels.BACKEND in BACKENDS
    assert kernels.compiled_available() == ("cython" in BACKENDS)


def test_env_var_forces_python():
    code = "from superkvn import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, SUPERKVN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("name", NAMES)
def test_blade_sign_table(name):
    k = BACKENDS[name]
    assert k.blade_sign(0b01, 0b10) == 1
    assert k.blade_sign(0b10, 0b01) == -1
    assert k.blade_sign(0b11, 0b01) == 0
    assert k.blade_sign(0b110, 0b001) == 1


terms = st.dictionaries(st.integers(0, 63), st.integers(-20, 20).filter(bool), max_size=10)


@settings(max_examples=100, deadline=None)
@given(terms, terms)
def test_graded_mul_agrees(a, b):
    ref = _pykernels.graded_mul(a, b)
    for k in BACKENDS.values():
        assert k.graded_mul(a, b) == ref


@settings(max_examples=30, deadline=None)
@given(hnp.arrays(np.float64, (9, 7), elements=st.floats(-5, 5)),
       st.lists(st.tuples(st.floats(-2, 10), st.floats(-2, 8)), min_size=1, max_size=20))
def test_cubic_interp_agrees(values, pts):
    xi = np.array([p[0] for p in pts])
    yi = np.array([p[1] for p in pts])
    ref = _pykernels.cubic_interp2d(values, xi, yi)
    for k in BACKENDS.values():
        assert np.allclose(k.cubic_interp2d(values, xi, yi), ref, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("name", NAMES)
def test_cubic_interp_reproduces_nodes_and_cubics(name):
    k = BACKENDS[name]
    x = np.arange(12.0)
    X, Y = np.meshgrid(x, x, indexing="ij")
    f = 0.3 * X ** 2 - 0.1 * X * Y + Y
    assert np.allclose(k.cubic_interp2d(f, X, Y), f)
    xi, yi = np.array([3.3, 5.75]), np.array([4.1, 6.5])
    # Keys' kernel is exact for quadratics away from the edges
    assert np.allclose(k.cubic_interp2d(f, xi, yi), 0.3 * xi ** 2 - 0.1 * xi * yi + yi)


@pytest.mark.parametrize("name", NAMES)
def test_gelfand_yaglom_matches_det(name):
    k = BACKENDS[name]
    rng = np.random.default_rng(0)
    n = 9
    diag, off = rng.uniform(1.5, 3, n), rng.uniform(-1, 1, n - 1)
    D = k.gelfand_yaglom(diag, off)
    M = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    assert D[0] == 1.0
    for j in range(1, n + 1):
        assert D[j] == pytest.approx(np.linalg.det(M[:j, :j]), rel=1e-12)


@pytest.mark.parametrize("name", NAMES)
def test_tridiag_solve(name):
    k = BACKENDS[name]
    rng = np.random.default_rng(1)
    n = 40
    diag, off, rhs = rng.uniform(3, 4, n), rng.uniform(-1, 1, n - 1), rng.standard_normal(n)
    M = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    assert np.allclose(k.tridiag_solve(diag, off, rhs), np.linalg.solve(M, rhs), rtol=1e-12)


def test_algebra_suite_under_pure_python(tmp_path):
    env = dict(os.environ, SUPERKVN_PURE_PYTHON="1", SUPERKVN_OUT=str(tmp_path))
    out = subprocess.run([sys.executable, "-m", "superkvn.cli", "verify", "algebra", "--seed", "3"],
                         env=env, capture_output=True, text=True)
    assert out.returncode == 0, out.stdout + out.stderr
