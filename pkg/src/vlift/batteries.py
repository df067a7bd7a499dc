"""Sample families for batteries: structured squares, exhaustive small
preorders, random composable modules and a deterministic process pool."""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from . import matrix as mx
from .quantale import Quantale
from .sampling import random_category, random_functor_into, random_matrix, random_module, transitive_closure
from .squares import LaxSquare, cocomma_square
from .vcat import (
    VCat,
    VFunctor,
    all_functors,
    free_on_preorder,
    identity_functor,
    preorder_closure,
)
from .vmod import Module


def yoneda_squares(f: VFunctor) -> tuple[LaxSquare, LaxSquare]:
    """The two squares with identity comparison built from ``f`` and identities."""
    ia, ib = identity_functor(f.src), identity_functor(f.dst)
    return LaxSquare(ia, f, f, ib), LaxSquare(f, ia, ib, f)


def ff_square(f: VFunctor) -> LaxSquare:
    """``(1, 1, f, f)``: exact iff ``f`` is fully faithful."""
    ia = identity_functor(f.src)
    return LaxSquare(ia, ia, f, f)


def adjunction_square(f: VFunctor, u: VFunctor) -> LaxSquare:
    """For ``f: X -> A`` and ``u: A -> X``: exact iff ``f -| u`` (needs ``1 <= u f``)."""
    ix = identity_functor(f.src)
    return LaxSquare(ix, f, ix, u)


def all_preorders(q: Quantale, n: int, prefix: str = "o") -> list[VCat]:
    """Every preorder on ``n`` labelled points, as a free V-category."""
    objs = [f"{prefix}{i}" for i in range(n)]
    off = [(a, b) for a in objs for b in objs if a != b]
    seen = {}
    for bits in itertools.product((0, 1), repeat=len(off)):
        pairs = [p for p, keep in zip(off, bits) if keep]
        P = preorder_closure(objs, pairs)
        if P.relation == frozenset(pairs) | {(a, a) for a in objs}:
            seen.setdefault(P.relation, P)
    return [free_on_preorder(q, P) for P in seen.values()]


def small_preorders(q: Quantale, max_size: int, prefix: str = "o") -> list[VCat]:
    return [A for n in range(max_size + 1) for A in all_preorders(q, n, prefix)]


def all_functor_samples(cats_a: Sequence[VCat], cats_b: Sequence[VCat]) -> Iterable[VFunctor]:
    for A in cats_a:
        for B in cats_b:
            yield from all_functors(A, B)


def random_composable_pair(q: Quantale, rng: random.Random, max_size: int = 3) -> tuple[Module, Module]:
    """``(S, R)`` with ``R: A -|-> B`` and ``S: B -|-> C``."""
    A = random_category(q, rng.randint(1, max_size), rng, prefix="a")
    B = random_category(q, rng.randint(1, max_size), rng, prefix="b")
    C = random_category(q, rng.randint(1, max_size), rng, prefix="c")
    return random_module(B, C, rng), random_module(A, B, rng)


def random_functor(q: Quantale, rng: random.Random, max_size: int = 3) -> VFunctor:
    B = random_category(q, rng.randint(1, max_size), rng, prefix="b")
    return random_functor_into(B, rng.randint(1, max_size), rng, prefix="a")


def random_cospan_sources(q: Quantale, rng: random.Random, max_size: int = 3) -> tuple[VFunctor, VFunctor]:
    """``f: C -> A`` and ``g: C -> B`` with a common random source ``C``.

    ``C`` gets random homs below ``A(f-, f-) meet B(g-, g-)``, closed up.
    """
    A = random_category(q, rng.randint(1, max_size), rng, prefix="a")
    B = random_category(q, rng.randint(1, max_size), rng, prefix="b")
    n = rng.randint(0, max_size)
    fmap = [rng.randrange(A.size) for _ in range(n)]
    gmap = [rng.randrange(B.size) for _ in range(n)]
    fi, gi = np.asarray(fmap, dtype=np.intp), np.asarray(gmap, dtype=np.intp)
    bound = mx.pointwise_meet(q, A.hom[np.ix_(fi, fi)], B.hom[np.ix_(gi, gi)])
    H = mx.pointwise_meet(q, random_matrix(q, (n, n), rng, 0.4), bound).copy()
    for i in range(n):
        H[i, i] = q.unit
    C = VCat(q, tuple(f"c{i}" for i in range(n)), transitive_closure(q, mx.frozen(H)))
    return VFunctor(C, A, tuple(fmap)), VFunctor(C, B, tuple(gmap))


def structured_squares(functors: Iterable[VFunctor], cospans: Iterable[tuple[VFunctor, VFunctor]] = ()) -> list[LaxSquare]:
    out = []
    for f in functors:
        out.extend(yoneda_squares(f))
    for f, g in cospans:
        out.append(cocomma_square(f, g))
    return out


def run_chunks(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """``[fn(x) for x in items]`` with an optional process pool; order is kept."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))
