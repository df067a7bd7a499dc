"""Integer kernels for finite quantales.

Values of a finite quantale are chain indices ``0..n``, so ``join`` is
``max``, ``meet`` is ``min`` and tensor/hom are table lookups.  Each kernel
exists twice: a numba ``@njit`` loop and a vectorised numpy version.  The
numba path is used when numba imports and ``VLIFT_NUMBA`` is not ``0``.

Kernels:

``sup_tensor(X, Y, T)``
    ``out[i, j] = max_k T[X[i, k], Y[k, j]]`` (empty join is ``0``).
``inf_hom(X, Y, H, top)``
    ``out[i, j] = min_k H[X[i, k], Y[j, k]]`` (empty meet is ``top``).
``category_violation(M, T, unit)``
    first ``(a, b, c)`` with ``T[M[b, c], M[a, b]] > M[a, c]``, or an
    identity failure ``(a, a, a)``; ``None`` if the matrix is a category.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "sup_tensor",
    "inf_hom",
    "category_violation",
    "sup_tensor_numpy",
    "inf_hom_numpy",
    "category_violation_numpy",
    "sup_tensor_numba",
    "inf_hom_numba",
    "category_violation_numba",
    "HAVE_NUMBA",
]

# numpy temporaries are bounded to this many elements per chunk
_CHUNK = 1 << 22


def sup_tensor_numpy(X: np.ndarray, Y: np.ndarray, T: np.ndarray) -> np.ndarray:
    m, k = X.shape
    p = Y.shape[1]
    out = np.zeros((m, p), dtype=np.int64)
    if k == 0 or m == 0 or p == 0:
        return out
    rows = max(1, _CHUNK // max(1, k * p))
    for s in range(0, m, rows):
        blk = T[X[s : s + rows, :, None], Y[None, :, :]]
        out[s : s + rows] = blk.max(axis=1)
    return out


def inf_hom_numpy(X: np.ndarray, Y: np.ndarray, H: np.ndarray, top: int) -> np.ndarray:
    m, k = X.shape
    p = Y.shape[0]
    out = np.full((m, p), top, dtype=np.int64)
    if k == 0 or m == 0 or p == 0:
        return out
    rows = max(1, _CHUNK // max(1, k * p))
    for s in range(0, m, rows):
        blk = H[X[s : s + rows, None, :], Y[None, :, :]]
        out[s : s + rows] = blk.min(axis=2)
    return out


def category_violation_numpy(M: np.ndarray, T: np.ndarray, unit: int):
    n = M.shape[0]
    diag = np.diagonal(M)
    bad = np.nonzero(diag < unit)[0]
    if bad.size:
        a = int(bad[0])
        return (a, a, a)
    if n == 0:
        return None
    # comp[a, b, c] = M[b, c] (x) M[a, b]
    for a in range(n):
        comp = T[M[:, :], M[a, :, None]]  # [b, c]
        viol = comp > M[a][None, :]
        if viol.any():
            b, c = np.argwhere(viol)[0]
            return (a, int(b), int(c))
    return None


try:  # pragma: no cover - exercised through BACKEND
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @njit(cache=True)
    def _sup_tensor_loop(X, Yt, T):
        # Yt is Y transposed so that the inner loop reads rows
        m, k = X.shape
        p = Yt.shape[0]
        top = T.shape[0] - 1
        out = np.zeros((m, p), dtype=np.int64)
        for i in range(m):
            for j in range(p):
                acc = 0
                for t in range(k):
                    v = T[X[i, t], Yt[j, t]]
                    if v > acc:
                        acc = v
                        if acc == top:
                            break
                out[i, j] = acc
        return out

    @njit(cache=True)
    def _inf_hom_loop(X, Y, H, top):
        m, k = X.shape
        p = Y.shape[0]
        out = np.empty((m, p), dtype=np.int64)
        for i in range(m):
            for j in range(p):
                acc = top
                for t in range(k):
                    v = H[X[i, t], Y[j, t]]
                    if v < acc:
                        acc = v
                        if acc == 0:
                            break
                out[i, j] = acc
        return out

    @njit(cache=True)
    def _category_violation_loop(M, T, unit):
        n = M.shape[0]
        for a in range(n):
            if M[a, a] < unit:
                return a, a, a
        for a in range(n):
            for b in range(n):
                x = M[a, b]
                for c in range(n):
                    if T[M[b, c], x] > M[a, c]:
                        return a, b, c
        return -1, -1, -1

    def sup_tensor_numba(X, Y, T):
        return _sup_tensor_loop(
            np.ascontiguousarray(X, dtype=np.int64),
            np.ascontiguousarray(np.asarray(Y).T, dtype=np.int64),
            np.ascontiguousarray(T, dtype=np.int64),
        )

    def inf_hom_numba(X, Y, H, top):
        return _inf_hom_loop(
            np.ascontiguousarray(X, dtype=np.int64),
            np.ascontiguousarray(Y, dtype=np.int64),
            np.ascontiguousarray(H, dtype=np.int64),
            int(top),
        )

    def category_violation_numba(M, T, unit):
        a, b, c = _category_violation_loop(
            np.ascontiguousarray(M, dtype=np.int64),
            np.ascontiguousarray(T, dtype=np.int64),
            int(unit),
        )
        if a < 0:
            return None
        return (int(a), int(b), int(c))

else:  # pragma: no cover
    sup_tensor_numba = sup_tensor_numpy
    inf_hom_numba = inf_hom_numpy
    category_violation_numba = category_violation_numpy


def _select_backend() -> str:
    flag = os.environ.get("VLIFT_NUMBA", "1").strip().lower()
    if HAVE_NUMBA and flag not in ("0", "false", "no", "off"):
        return "numba"
    return "numpy"


BACKEND = _select_backend()

if BACKEND == "numba":
    sup_tensor = sup_tensor_numba
    inf_hom = inf_hom_numba
    category_violation = category_violation_numba
else:
    sup_tensor = sup_tensor_numpy
    inf_hom = inf_hom_numpy
    category_violation = category_violation_numpy
