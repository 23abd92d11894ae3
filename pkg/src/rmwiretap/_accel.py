"""Switch between numba-compiled kernels and the pure-numpy path.

Set ``RMWIRETAP_DISABLE_NUMBA=1`` before import to force the numpy path.
"""

import os

_FLAG = "RMWIRETAP_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get(_FLAG, "").strip().lower() not in (
    "1",
    "true",
    "yes",
)


def njit(func):
    """``numba.njit(cache=True)`` when numba is installed, else identity."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)
