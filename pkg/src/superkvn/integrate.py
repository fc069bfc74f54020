"""Adaptive Dormand–Prince 5(4) integration of ``y' = f(t, y)``.

The state may carry trailing batch axes; a single step size is shared by the
whole batch and the error norm is the worst component.  This keeps vectorized
back-tracing of many characteristics as cheap as tracing one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationFailure

# Butcher tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    max_error: float = 0.0


def dopri45(f, y0, t0: float, t1: float, tol: float = 1e-10, *, atol: float | None = None,
            h0: float | None = None, max_steps: int = 1_000_000):
    """Integrate from ``t0`` to ``t1`` and return ``(y(t1), StepStats)``.

    ``tol`` is the relative tolerance and, unless ``atol`` is given, also the
    absolute one.  ``max_error`` in the statistics is the largest accepted
    local error estimate in the same scaled norm, times ``tol``.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    atol = tol if atol is None else atol
    y = np.array(y0, dtype=np.result_type(y0, np.float64), copy=True)
    stats = StepStats()
    span = t1 - t0
    if span == 0:
        return y, stats
    direction = 1.0 if span > 0 else -1.0
    t = t0
    k1 = np.asarray(f(t, y))
    if h0 is None:
        scale = atol + tol * np.abs(y)
        d0 = np.max(np.abs(y) / scale)
        d1 = np.max(np.abs(k1) / scale)
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h = min(h, abs(span))
    else:
        h = abs(h0)
    hmin = 16 * np.finfo(float).eps * max(abs(t0), abs(t1), 1.0)
    for _ in range(max_steps):
        remaining = (t1 - t) * direction
        if remaining <= 0:
            return y, stats
        last = h >= remaining
        if last:
            h = remaining
        hs = h * direction
        ks = [k1]
        for i in range(1, 7):
            yi = y + hs * sum(a * k for a, k in zip(_A[i], ks) if a)
            ks.append(np.asarray(f(t + _C[i] * hs, yi)))
        # FSAL: the 7th stage is evaluated at the 5th-order solution
        y_new = y + hs * sum(b * k for b, k in zip(_B5, ks) if b)
        err = hs * sum(e * k for e, k in zip(_E, ks) if e)
        scale = atol + tol * np.maximum(np.abs(y), np.abs(y_new))
        enorm = float(np.max(np.abs(err) / scale)) if err.size else 0.0
        if not np.isfinite(enorm):
            enorm = np.inf
        if enorm <= 1.0:
            t = t1 if last else t + hs
            y = y_new
            k1 = ks[6]
            stats.accepted += 1
            stats.max_error = max(stats.max_error, enorm * tol)
            fac = 5.0 if enorm == 0 else min(5.0, 0.9 * enorm ** -0.2)
            h = h * max(fac, 0.2)
        else:
            stats.rejected += 1
            h = h * max(0.2, 0.9 * enorm ** -0.2) if np.isfinite(enorm) else h * 0.2
            if h < hmin:
                raise IntegrationFailure(f"step size underflow at t = {t:.6g}")
    raise IntegrationFailure(f"exceeded {max_steps} steps before reaching t = {t1}")
