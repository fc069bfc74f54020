"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting the environment
variable ``SUPERKVN_PURE_PYTHON=1`` forces the reference implementation.
"""

from __future__ import annotations

import os

from . import _pykernels

_FORCE_PURE = os.environ.get("SUPERKVN_PURE_PYTHON", "").strip() not in ("", "0")

if _FORCE_PURE:
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
graded_mul = _impl.graded_mul
blade_sign = _impl.blade_sign
cubic_interp2d = _impl.cubic_interp2d
gelfand_yaglom = _impl.gelfand_yaglom
tridiag_solve = _impl.tridiag_solve


def compiled_available() -> bool:
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True


def backends() -> dict:
    """All importable backends, keyed by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
