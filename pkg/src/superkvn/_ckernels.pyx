# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

BACKEND = "cython"


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _popcount(unsigned long long x) nogil:
    return __builtin_popcountll(x)


cpdef int blade_sign(object ma_obj, object mb_obj):
    cdef unsigned long long ma = ma_obj, mb = mb_obj, low
    cdef int swaps = 0, j
    if ma & mb:
        return 0
    while mb:
        low = mb & (~mb + 1)
        j = _popcount(low - 1)
        swaps += _popcount(ma >> (j + 1)) if j < 63 else 0
        mb ^= low
    return -1 if (swaps & 1) else 1


def graded_mul(dict a, dict b):
    cdef dict out = {}
    cdef unsigned long long ma, mb, low, m
    cdef int swaps, j
    cdef object ca, cb, c, prev, key
    for ka, ca in a.items():
        ma = ka
        for kb, cb in b.items():
            mb = kb
            if ma & mb:
                continue
            swaps = 0
            m = mb
            while m:
                low = m & (~m + 1)
                j = _popcount(low - 1)
                if j < 63:
                    swaps += _popcount(ma >> (j + 1))
                m ^= low
            c = ca * cb
            if swaps & 1:
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


cdef inline void _keys(double s, double* w) nogil:
    w[0] = ((-0.5 * s + 1.0) * s - 0.5) * s
    w[1] = (1.5 * s - 2.5) * s * s + 1.0
    w[2] = ((-1.5 * s + 2.0) * s + 0.5) * s
    w[3] = (0.5 * s - 0.5) * s * s


def cubic_interp2d(values, xi, yi):
    cdef cnp.complex128_t[:, ::1] v = np.ascontiguousarray(values, dtype=np.complex128)
    xa = np.ascontiguousarray(xi, dtype=np.float64)
    shape = xa.shape
    cdef double[::1] x = xa.ravel()
    cdef double[::1] y = np.ascontiguousarray(yi, dtype=np.float64).ravel()
    cdef Py_ssize_t n = x.shape[0], nx = v.shape[0], ny = v.shape[1]
    out_arr = np.zeros(n, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    cdef Py_ssize_t k, px, py
    cdef int a, b
    cdef long ix, iy
    cdef double wx[4]
    cdef double wy[4]
    cdef double re, im, w
    with nogil:
        for k in range(n):
            ix = <long>floor(x[k])
            iy = <long>floor(y[k])
            _keys(x[k] - ix, wx)
            _keys(y[k] - iy, wy)
            re = 0.0
            im = 0.0
            for a in range(4):
                px = ix + a - 1
                if px < 0 or px >= nx:
                    continue
                for b in range(4):
                    py = iy + b - 1
                    if py < 0 or py >= ny:
                        continue
                    w = wx[a] * wy[b]
                    re = re + v[px, py].real * w
                    im = im + v[px, py].imag * w
            out[k].real = re
            out[k].imag = im
    return out_arr.reshape(shape)


def gelfand_yaglom(diag, off):
    cdef double[::1] dg = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] of = np.ascontiguousarray(off, dtype=np.float64)
    cdef Py_ssize_t m = dg.shape[0], k
    d_arr = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] d = d_arr
    d[0] = 1.0
    if m == 0:
        return d_arr
    d[1] = dg[0]
    with nogil:
        for k in range(2, m + 1):
            d[k] = dg[k - 1] * d[k - 1] - of[k - 2] * of[k - 2] * d[k - 2]
    return d_arr


def tridiag_solve(diag, off, rhs):
    cdef double[::1] dg = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] of = np.ascontiguousarray(off, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(rhs, dtype=np.float64)
    cdef Py_ssize_t m = dg.shape[0], i
    x_arr = np.empty(m, dtype=np.float64)
    if m == 0:
        return x_arr
    cdef double[::1] x = x_arr
    cdef double[::1] cp = np.empty(m, dtype=np.float64)
    cdef double[::1] dp = np.empty(m, dtype=np.float64)
    cdef double denom
    with nogil:
        cp[0] = of[0] / dg[0] if m > 1 else 0.0
        dp[0] = r[0] / dg[0]
        for i in range(1, m):
            denom = dg[i] - of[i - 1] * cp[i - 1]
            cp[i] = of[i] / denom if i < m - 1 else 0.0
            dp[i] = (r[i] - of[i - 1] * dp[i - 1]) / denom
        x[m - 1] = dp[m - 1]
        for i in range(m - 2, -1, -1):
            x[i] = dp[i] - cp[i] * x[i + 1]
    return x_arr
