"""Quantale-valued matrices.

Matrices are numpy arrays: ``int64`` chain indices for finite quantales,
``object`` arrays of exact values otherwise.  Everything here dispatches on
``q.finite`` so that callers never touch raw arithmetic.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import kernels
from .quantale import Quantale


def as_matrix(q: Quantale, rows, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Copy ``rows`` into a read-only matrix, checking carrier membership."""
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        src = rows
    else:
        rows = [list(r) for r in rows]
        if shape is not None and not rows:
            src = np.empty(shape, dtype=np.int64 if q.finite else object)
        else:
            width = {len(r) for r in rows}
            if len(width) > 1:
                raise ValueError("ragged matrix")
            src = np.empty((len(rows), width.pop() if width else 0), dtype=object)
            for i, r in enumerate(rows):
                for j, v in enumerate(r):
                    src[i, j] = v
    if shape is not None and src.shape != tuple(shape):
        raise ValueError(f"matrix has shape {src.shape}, expected {tuple(shape)}")
    if q.finite:
        for v in src.flat:
            q.check(v)
        out = np.array(src, dtype=np.int64)
    else:
        out = np.empty(src.shape, dtype=object)
        for idx, v in np.ndenumerate(src):
            q.check(v)
            out[idx] = v
    out.flags.writeable = False
    return out


def frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def full(q: Quantale, shape, value) -> np.ndarray:
    if q.finite:
        return frozen(np.full(shape, value, dtype=np.int64))
    out = np.empty(shape, dtype=object)
    out.fill(value)
    return frozen(out)


def bottoms(q: Quantale, shape) -> np.ndarray:
    return full(q, shape, q.bottom)


def tops(q: Quantale, shape) -> np.ndarray:
    return full(q, shape, q.top)


def diagonal(q: Quantale, n: int) -> np.ndarray:
    """``I`` on the diagonal, ``bottom`` elsewhere."""
    out = bottoms(q, (n, n)).copy()
    for i in range(n):
        out[i, i] = q.unit
    return frozen(out)


def block(q: Quantale, blocks: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    dtype = np.int64 if q.finite else object
    return frozen(np.block([[np.asarray(b, dtype=dtype) for b in row] for row in blocks]))


def equal(x: np.ndarray, y: np.ndarray) -> bool:
    return x.shape == y.shape and bool(np.all(x == y)) if x.size else x.shape == y.shape


def le_all(q: Quantale, x: np.ndarray, y: np.ndarray) -> bool:
    if q.finite:
        return bool(np.all(x <= y))
    return all(q.le(a, b) for a, b in zip(x.flat, y.flat))


def first_not_le(q: Quantale, x: np.ndarray, y: np.ndarray):
    """Index of the first entry with ``not x <= y``, or ``None``."""
    if q.finite:
        bad = np.argwhere(x > y)
        return tuple(int(i) for i in bad[0]) if bad.size else None
    for idx in np.ndindex(*x.shape):
        if not q.le(x[idx], y[idx]):
            return idx
    return None


def first_difference(x: np.ndarray, y: np.ndarray):
    if x.dtype != object and y.dtype != object:
        bad = np.argwhere(x != y)
        return tuple(int(i) for i in bad[0]) if bad.size else None
    for idx in np.ndindex(*x.shape):
        if x[idx] != y[idx]:
            return tuple(int(i) for i in idx)
    return None


def pointwise_tensor(q: Quantale, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if q.finite:
        return frozen(q.tensor_table[x, y])
    out = np.empty(np.broadcast_shapes(x.shape, y.shape), dtype=object)
    xb, yb = np.broadcast_arrays(x, y)
    for idx in np.ndindex(*out.shape):
        out[idx] = q.tensor(xb[idx], yb[idx])
    return frozen(out)


def pointwise_hom(q: Quantale, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if q.finite:
        return frozen(q.hom_table[x, y])
    out = np.empty(np.broadcast_shapes(x.shape, y.shape), dtype=object)
    xb, yb = np.broadcast_arrays(x, y)
    for idx in np.ndindex(*out.shape):
        out[idx] = q.hom(xb[idx], yb[idx])
    return frozen(out)


def pointwise_join(q: Quantale, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if q.finite:
        return frozen(np.maximum(x, y))
    out = np.empty(x.shape, dtype=object)
    for idx in np.ndindex(*x.shape):
        out[idx] = q.join2(x[idx], y[idx])
    return frozen(out)


def pointwise_meet(q: Quantale, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if q.finite:
        return frozen(np.minimum(x, y))
    out = np.empty(x.shape, dtype=object)
    for idx in np.ndindex(*x.shape):
        out[idx] = q.meet2(x[idx], y[idx])
    return frozen(out)


def sup_tensor(q: Quantale, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``out[i, j] = join_k x[i, k] (x) y[k, j]``."""
    if x.shape[1] != y.shape[0]:
        raise ValueError(f"inner dimensions differ: {x.shape} vs {y.shape}")
    if q.finite:
        return frozen(kernels.sup_tensor(x, y, q.tensor_table))
    m, k = x.shape
    p = y.shape[1]
    out = np.empty((m, p), dtype=object)
    for i in range(m):
        for j in range(p):
            out[i, j] = q.join(q.tensor(x[i, t], y[t, j]) for t in range(k))
    return frozen(out)


def inf_hom(q: Quantale, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``out[i, j] = meet_k [x[i, k], y[j, k]]``."""
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"row lengths differ: {x.shape} vs {y.shape}")
    if q.finite:
        return frozen(kernels.inf_hom(x, y, q.hom_table, q.top))
    m, k = x.shape
    p = y.shape[0]
    out = np.empty((m, p), dtype=object)
    for i in range(m):
        for j in range(p):
            out[i, j] = q.meet(q.hom(x[i, t], y[j, t]) for t in range(k))
    return frozen(out)


def row_meet(q: Quantale, x: np.ndarray) -> np.ndarray:
    """Meet along the last axis."""
    if q.finite:
        if x.shape[-1] == 0:
            return frozen(np.full(x.shape[:-1], q.top, dtype=np.int64))
        return frozen(x.min(axis=-1))
    out = np.empty(x.shape[:-1], dtype=object)
    for idx in np.ndindex(*out.shape):
        out[idx] = q.meet(x[idx])
    return frozen(out)


def category_violation(q: Quantale, m: np.ndarray):
    """First failing ``(a, b, c)`` of the category axioms or ``None``.

    ``(a, a, a)`` flags ``I <= m[a, a]`` failing.
    """
    if q.finite:
        return kernels.category_violation(m, q.tensor_table, q.unit)
    n = m.shape[0]
    for a in range(n):
        if not q.le(q.unit, m[a, a]):
            return (a, a, a)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if not q.le(q.tensor(m[b, c], m[a, b]), m[a, c]):
                    return (a, b, c)
    return None


def key(m: np.ndarray):
    """Hashable content key."""
    if m.dtype == object:
        return (m.shape, tuple(m.flat))
    return (m.shape, m.tobytes())
