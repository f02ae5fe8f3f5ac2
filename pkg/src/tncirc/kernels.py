"""Hot loops for pairwise contraction.

Every contraction is reduced to a complex matrix product ``(X, Y) @ (Y, Z)``
after the operands have been permuted so that summed legs are adjacent.
With numba available the product runs in an ``@njit`` kernel whose
per-entry accumulation order over ``Y`` is fixed, so the parallel variant is
bitwise identical to the serial one. Without numba (or with
``TNCIRC_DISABLE_NUMBA=1``) numpy's BLAS-backed ``matmul`` is used instead.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._jit import NUMBA_OK, nb, njit, prange

BACKEND = "numba" if NUMBA_OK else "numpy"


@njit(cache=True)
def _matmul_serial(a, b, out):
    nx, ny = a.shape
    nz = b.shape[1]
    for i in range(nx):
        for j in range(ny):
            aij = a[i, j]
            if aij == 0:
                continue
            for k in range(nz):
                out[i, k] += aij * b[j, k]


@njit(cache=True, parallel=True)
def _matmul_parallel(a, b, out):
    nx, ny = a.shape
    nz = b.shape[1]
    for i in prange(nx):
        for j in range(ny):
            aij = a[i, j]
            if aij == 0:
                continue
            for k in range(nz):
                out[i, k] += aij * b[j, k]


@njit(cache=True)
def _diag_trace(t):
    out = np.zeros((t.shape[0], t.shape[2], t.shape[4]), dtype=t.dtype)
    for i in range(t.shape[0]):
        for d in range(4):
            for j in range(t.shape[2]):
                for k in range(t.shape[4]):
                    out[i, j, k] += t[i, d, j, d, k]
    return out


def _numpy_matmul(a, b, threads):
    if threads <= 1 or a.shape[0] < threads:
        return a @ b
    out = np.empty((a.shape[0], b.shape[1]), dtype=np.complex128)
    bounds = np.linspace(0, a.shape[0], threads + 1).astype(int)

    def work(lo, hi):
        np.matmul(a[lo:hi], b, out=out[lo:hi])

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, bounds[:-1], bounds[1:]))
    return out


def matmul(a: np.ndarray, b: np.ndarray, threads: int = 1, backend: str | None = None) -> np.ndarray:
    """Complex matrix product used by every pairwise contraction.

    ``threads > 1`` splits output rows across workers; each output entry is
    still produced by exactly one worker.
    """
    backend = backend or BACKEND
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    if backend == "numpy":
        return _numpy_matmul(a, b, threads)
    if backend != "numba" or not NUMBA_OK:
        raise ValueError(f"unknown or unavailable kernel backend {backend!r}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.complex128)
    if threads > 1:
        nb.set_num_threads(min(threads, nb.config.NUMBA_NUM_THREADS))
        _matmul_parallel(a, b, out)
    else:
        _matmul_serial(a, b, out)
    return out


def diag_trace(t: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Sum ``t[i, d, j, d, k]`` over ``d`` for a 5-d array with two size-4 legs."""
    backend = backend or BACKEND
    if backend == "numba" and NUMBA_OK:
        return _diag_trace(np.ascontiguousarray(t, dtype=np.complex128))
    return np.einsum("idjdk->ijk", t)
