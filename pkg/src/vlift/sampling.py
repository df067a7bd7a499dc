"""Random generation of categories, functors, modules and lax squares for
property tests and batteries.  All generators take a ``random.Random``."""

from __future__ import annotations

import random

import numpy as np

from . import matrix as mx
from .quantale import Quantale
from .squares import LaxSquare
from .vcat import VCat, VFunctor, free_on_preorder, preorder_closure
from .vmod import Module, bimodule_closure


def _values(q: Quantale, rng: random.Random, count: int, sparsity: float, denominators) -> list:
    vals = q.sample_values(count, rng, denominators) if not q.finite else q.sample_values(count, rng)
    return [q.bottom if rng.random() < sparsity else v for v in vals]


def random_matrix(q: Quantale, shape, rng: random.Random, sparsity: float = 0.3, denominators=(2, 4, 8)) -> np.ndarray:
    m, n = shape
    vals = _values(q, rng, m * n, sparsity, denominators)
    return mx.as_matrix(q, [vals[i * n : (i + 1) * n] for i in range(m)], (m, n))


def transitive_closure(q: Quantale, H: np.ndarray) -> np.ndarray:
    """Least category hom above ``H`` (``H`` must already have ``I`` on the diagonal)."""
    while True:
        nxt = mx.pointwise_join(q, H, mx.sup_tensor(q, H, H))
        if mx.equal(nxt, H):
            return H
        H = nxt


def _with_unit_diagonal(q: Quantale, H: np.ndarray) -> np.ndarray:
    H = H.copy()
    for i in range(H.shape[0]):
        H[i, i] = q.unit
    return mx.frozen(H)


def random_category(
    q: Quantale,
    n: int,
    rng: random.Random,
    sparsity: float = 0.4,
    prefix: str = "o",
    denominators=(2, 4, 8),
) -> VCat:
    H = _with_unit_diagonal(q, random_matrix(q, (n, n), rng, sparsity, denominators))
    return VCat(q, tuple(f"{prefix}{i}" for i in range(n)), transitive_closure(q, H))


def random_preorder_category(q: Quantale, n: int, rng: random.Random, p: float = 0.3, prefix: str = "o") -> VCat:
    objs = [f"{prefix}{i}" for i in range(n)]
    pairs = [(a, b) for a in objs for b in objs if a != b and rng.random() < p]
    return free_on_preorder(q, preorder_closure(objs, pairs))


def random_functor_into(
    B: VCat,
    n: int,
    rng: random.Random,
    sparsity: float = 0.4,
    prefix: str = "a",
    denominators=(2, 4, 8),
) -> VFunctor:
    """A random category ``A`` on ``n`` objects with a random functor into ``B``."""
    q = B.quantale
    fmap = tuple(rng.randrange(B.size) for _ in range(n)) if B.size else ()
    if n and not B.size:
        raise ValueError("cannot map objects into an empty category")
    bound = B.hom[np.ix_(fmap, fmap)] if n else mx.bottoms(q, (0, 0))
    raw = mx.pointwise_meet(q, random_matrix(q, (n, n), rng, sparsity, denominators), bound)
    H = transitive_closure(q, _with_unit_diagonal(q, raw))
    A = VCat(q, tuple(f"{prefix}{i}" for i in range(n)), H)
    return VFunctor(A, B, fmap)


def random_module(
    A: VCat,
    B: VCat,
    rng: random.Random,
    sparsity: float = 0.5,
    denominators=(2, 4, 8),
) -> Module:
    M = random_matrix(A.quantale, (B.size, A.size), rng, sparsity, denominators)
    return bimodule_closure(A, B, M)


def random_lax_square(
    q: Quantale,
    rng: random.Random,
    max_objects: int = 4,
    sparsity: float = 0.4,
) -> LaxSquare:
    """Random ``C``, functors ``f: A -> C`` and ``g: B -> C`` and a lax apex.

    The apex objects are the pairs ``(a, b)`` with ``I <= C(fa, gb)``; its
    homs lie below ``A(a,a') meet B(b,b')``.
    """
    C = random_category(q, rng.randint(1, max_objects), rng, sparsity, prefix="c")
    f = random_functor_into(C, rng.randint(1, max_objects), rng, sparsity, prefix="a")
    g = random_functor_into(C, rng.randint(1, max_objects), rng, sparsity, prefix="b")
    A, B = f.src, g.src
    pairs = [
        (a, b)
        for a in range(A.size)
        for b in range(B.size)
        if q.le(q.unit, C.hom[f.map[a], g.map[b]])
    ]
    rng.shuffle(pairs)
    pairs = sorted(pairs[: rng.randint(0, min(len(pairs), max_objects))])
    n = len(pairs)
    bound = mx.bottoms(q, (n, n)).copy()
    for i, (a, b) in enumerate(pairs):
        for j, (a2, b2) in enumerate(pairs):
            bound[i, j] = q.meet2(A.hom[a, a2], B.hom[b, b2])
    raw = mx.pointwise_meet(q, random_matrix(q, (n, n), rng, sparsity), mx.frozen(bound))
    H = transitive_closure(q, _with_unit_diagonal(q, raw))
    P = VCat(q, tuple(f"w{i}" for i in range(n)), H)
    p0 = VFunctor(P, A, tuple(a for a, _ in pairs))
    p1 = VFunctor(P, B, tuple(b for _, b in pairs))
    return LaxSquare(p0, p1, f, g)
