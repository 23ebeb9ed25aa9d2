"""Optional numba acceleration.

Set ``PERMKIT_NO_JIT=1`` to force the pure-numpy paths. The flag is read once
at import time; tests that need both paths call the ``*_numba`` and
``*_numpy`` variants in :mod:`permkit._kernels` directly.
"""
import os

_DISABLED = os.environ.get("PERMKIT_NO_JIT", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("disabled by PERMKIT_NO_JIT")
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:
    _numba_njit = None
    HAVE_NUMBA = False


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if _numba_njit is None:
        return func
    return _numba_njit(cache=True)(func)


def jit_enabled() -> bool:
    return HAVE_NUMBA
