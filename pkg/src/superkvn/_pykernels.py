"""Reference (pure Python / numpy) implementations of the hot kernels.

The compiled module ``superkvn._ckernels`` exposes the same four functions
with identical signatures and results; :mod:`superkvn.kernels` picks one at
import time.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

BACKEND = "python"


@lru_cache(maxsize=1 << 16)
def blade_sign(ma: int, mb: int) -> int:
    """Sign of merging two ascending generator monomials (0 if they overlap)."""
    if ma & mb:
        return 0
    swaps = 0
    m = mb
    while m:
        low = m & -m
        swaps += (ma >> low.bit_length()).bit_count()
        m ^= low
    return -1 if swaps & 1 else 1


def graded_mul(a: dict, b: dict) -> dict:
    """Product of two supernumber term maps ``{bitmask: coefficient}``."""
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            s = blade_sign(ma, mb)
            if not s:
                continue
            c = ca * cb
            if s < 0:
                c = -c
            key = ma | mb
            prev = out.get(key)
            if prev is not None:
                c = prev + c
                if c:
                    out[key] = c
                else:
                    del out[key]
            elif c:
                out[key] = c
    return out


def _keys_weights(frac):
    # Keys cubic convolution, a = -1/2; taps at offsets -1, 0, 1, 2.
    s = frac
    w0 = ((-0.5 * s + 1.0) * s - 0.5) * s
    w1 = (1.5 * s - 2.5) * s * s + 1.0
    w2 = ((-1.5 * s + 2.0) * s + 0.5) * s
    w3 = (0.5 * s - 0.5) * s * s
    return (w0, w1, w2, w3)


def cubic_interp2d(values: np.ndarray, xi: np.ndarray, yi: np.ndarray) -> np.ndarray:
    """Keys-cubic interpolation of ``values`` at fractional indices ``(xi, yi)``.

    Taps falling outside the array contribute zero.  Returns complex128 of the
    same shape as ``xi``.
    """
    values = np.asarray(values, dtype=np.complex128)
    nx, ny = values.shape
    xi = np.asarray(xi, dtype=np.float64)
    yi = np.asarray(yi, dtype=np.float64)
    shape = xi.shape
    xi = xi.ravel()
    yi = yi.ravel()
    ix = np.floor(xi).astype(np.int64)
    iy = np.floor(yi).astype(np.int64)
    wx = _keys_weights(xi - ix)
    wy = _keys_weights(yi - iy)
    out = np.zeros(xi.shape, dtype=np.complex128)
    for a in range(4):
        px = ix + a - 1
        okx = (px >= 0) & (px < nx)
        pxc = np.clip(px, 0, nx - 1)
        for b in range(4):
            py = iy + b - 1
            ok = okx & (py >= 0) & (py < ny)
            pyc = np.clip(py, 0, ny - 1)
            out += np.where(ok, values[pxc, pyc], 0.0) * (wx[a] * wy[b])
    return out.reshape(shape)


def gelfand_yaglom(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    """Leading principal minors of a symmetric tridiagonal matrix.

    ``diag`` has length M, ``off`` length M-1.  Returns an array of length
    M+1 with ``D[0] = 1`` and ``D[k]`` the k-th leading minor.
    """
    diag = np.asarray(diag, dtype=np.float64)
    off = np.asarray(off, dtype=np.float64)
    m = diag.shape[0]
    d = np.empty(m + 1, dtype=np.float64)
    d[0] = 1.0
    if m == 0:
        return d
    d[1] = diag[0]
    for k in range(2, m + 1):
        d[k] = diag[k - 1] * d[k - 1] - off[k - 2] * off[k - 2] * d[k - 2]
    return d


def tridiag_solve(diag: np.ndarray, off: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a symmetric tridiagonal system by the Thomas algorithm."""
    diag = np.asarray(diag, dtype=np.float64)
    off = np.asarray(off, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    m = diag.shape[0]
    cp = np.empty(m, dtype=np.float64)
    dp = np.empty(m, dtype=np.float64)
    x = np.empty(m, dtype=np.float64)
    if m == 0:
        return x
    cp[0] = off[0] / diag[0] if m > 1 else 0.0
    dp[0] = rhs[0] / diag[0]
    for i in range(1, m):
        denom = diag[i] - off[i - 1] * cp[i - 1]
        cp[i] = off[i] / denom if i < m - 1 else 0.0
        dp[i] = (rhs[i] - off[i - 1] * dp[i - 1]) / denom
    x[m - 1] = dp[m - 1]
    for i in range(m - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x
