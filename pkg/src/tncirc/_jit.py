"""Numba switch.

Set ``TNCIRC_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.
"""

from __future__ import annotations

import os

_disabled = os.environ.get("TNCIRC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _disabled:
        raise ImportError
    import numba as nb

    NUMBA_OK = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip probing TBB first: an outdated TBB install only produces a warning
        nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:
    nb = None
    NUMBA_OK = False


def njit(*args, **kwargs):
    if NUMBA_OK:
        return nb.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda func: func


prange = nb.prange if NUMBA_OK else range


def max_threads() -> int:
    if NUMBA_OK:
        return nb.config.NUMBA_NUM_THREADS
    return os.cpu_count() or 1


__all__ = ["NUMBA_OK", "njit", "prange", "max_threads"]
