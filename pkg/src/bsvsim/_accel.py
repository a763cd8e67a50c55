"""Numba switch for the hot kernels.

Set ``BSVSIM_DISABLE_NUMBA=1`` to force the vectorised numpy fallback.
"""
import os

_disabled = os.environ.get("BSVSIM_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _disabled:
        raise ImportError("numba disabled by BSVSIM_DISABLE_NUMBA")
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        # bare @njit and @njit(...) both supported
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


def backend():
    return "numba" if NUMBA_AVAILABLE else "numpy"
