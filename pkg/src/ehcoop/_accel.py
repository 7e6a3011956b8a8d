"""Numba switch.

Set ``EHCOOP_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The jitted
and numpy variants of every kernel stay importable either way so they can
be benchmarked against each other.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("EHCOOP_DISABLE_NUMBA", "0").lower() in ("", "0", "false", "no")


def njit(fn):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


def pick(jitted, fallback):
    """Select the active implementation of a kernel pair."""
    return jitted if USE_NUMBA else fallback
