"""Optional numba acceleration.

Hot kernels are written once in a numba-compatible subset of Python. When
numba is importable and ``FRACSCREW_DISABLE_NUMBA`` is unset (or ``0``), they
are compiled with ``@njit``; otherwise the pure-numpy fallbacks registered next
to each kernel are used.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("FRACSCREW_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised through the env flag
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when acceleration is on, identity otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def configure_threads() -> int:
    """Apply the ``FRACSCREW_THREADS`` cap; returns the effective thread count."""
    cap = os.environ.get("FRACSCREW_THREADS")
    if not HAVE_NUMBA:
        return 1
    n = numba.config.NUMBA_NUM_THREADS
    if cap:
        n = max(1, min(n, int(cap)))
        numba.set_num_threads(n)
    return n


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
