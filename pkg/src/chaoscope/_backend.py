"""Kernel backend selection.

Set ``CHAOSCOPE_BACKEND=numpy`` to force the pure-numpy code paths; the
default uses numba when it can be imported.
"""
import os

_requested = os.environ.get("CHAOSCOPE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"CHAOSCOPE_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _requested == "numba"

numba_default = {
    "nopython": True,
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "boundscheck": False,
}


def njit(fn):
    """Compile with numba when available, otherwise return ``fn`` untouched."""
    if not HAVE_NUMBA:
        return fn
    return numba.jit(**numba_default)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
