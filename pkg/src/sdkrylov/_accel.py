"""Numba switch.

Hot kernels are written twice: a loop version compiled with ``numba.njit`` and
a pure-numpy version.  Setting ``SDKRYLOV_DISABLE_NUMBA=1`` (or running without
numba installed) selects the numpy path everywhere.
"""
import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("SDKRYLOV_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag in ("", "0", "false", "no")


def njit(fn):
    """Compile ``fn`` in nopython mode when numba is importable.

    Returns the plain Python function otherwise, so the loop source stays
    callable (and debuggable) without numba.
    """
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
