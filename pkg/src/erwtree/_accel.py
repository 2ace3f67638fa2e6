"""Backend selection for the hot kernels.

``ERW_BACKEND=numpy`` (or ``ERW_DISABLE_NUMBA=1``) forces the vectorised
numpy paths; otherwise numba is used when it imports.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


def _wants_numba() -> bool:
    if os.environ.get("ERW_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return False
    backend = os.environ.get("ERW_BACKEND", "numba").strip().lower()
    return backend != "numpy"


HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _wants_numba()


def njit(*args, **kwargs):
    """``numba.njit`` with caching on; identity decorator without numba."""
    kwargs.setdefault("cache", True)
    if numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"

