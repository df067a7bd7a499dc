"""Endofunctors of V-categories as evaluable expressions.

Grammar::

    T ::= Id | Const(X) | Sum(T, T) | Tensor(T, T) | Dual(T)
        | Lower(T) | Upper(T) | Power(T) | ConnectedComponents | TripleDiag

``Lower`` sends ``A`` to the presheaf category ``[A^op, V]``, ``Upper`` to
``[A, V]^op`` and ``Power`` to all V-subsets with the Egli-Milner hom.
``ConnectedComponents`` and ``TripleDiag`` are the two functors that fail
the Beck-Chevalley condition; they are kept for the counterexample batteries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import networkx as nx
import numpy as np

from . import matrix as mx
from .report import DEFAULT_MAX_OBJECTS, ShapeError, SizeGuardError, VLiftError
from .vcat import (
    VCat,
    VFunctor,
    copresheaf_category,
    coproduct_labels,
    full_subcategory,
    functor_le,
    opposite,
    presheaf_category,
    table_index,
    table_label,
    tensor_product,
)


class Expr:
    """Base class of endofunctor expressions (immutable and hashable)."""

    __slots__ = ()


@dataclass(frozen=True)
class Id(Expr):
    def __str__(self):
        return "Id"


@dataclass(frozen=True)
class Const(Expr):
    X: VCat
    name: str = ""

    def __str__(self):
        return f"Const({self.name or list(self.X.objects)})"


@dataclass(frozen=True)
class Sum(Expr):
    left: Expr
    right: Expr

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Tensor(Expr):
    left: Expr
    right: Expr

    def __str__(self):
        return f"({self.left} (x) {self.right})"


@dataclass(frozen=True)
class Dual(Expr):
    inner: Expr

    def __str__(self):
        return f"Dual({self.inner})"


@dataclass(frozen=True)
class Lower(Expr):
    inner: Expr = Id()

    def __str__(self):
        return f"L({self.inner})"


@dataclass(frozen=True)
class Upper(Expr):
    inner: Expr = Id()

    def __str__(self):
        return f"U({self.inner})"


@dataclass(frozen=True)
class Power(Expr):
    inner: Expr = Id()

    def __str__(self):
        return f"P({self.inner})"


@dataclass(frozen=True)
class ConnectedComponents(Expr):
    def __str__(self):
        return "CC"


@dataclass(frozen=True)
class TripleDiag(Expr):
    def __str__(self):
        return "TripleDiag"


_PRESHEAF_NODES = (Lower, Upper, Power)


def children(T: Expr) -> tuple:
    if isinstance(T, (Sum, Tensor)):
        return (T.left, T.right)
    if isinstance(T, (Dual, Lower, Upper, Power)):
        return (T.inner,)
    return ()


def depth(T: Expr) -> int:
    """Leaves have depth 1."""
    return 1 + max((depth(c) for c in children(T)), default=0)


def needs_finite(T: Expr) -> bool:
    return isinstance(T, _PRESHEAF_NODES) or any(needs_finite(c) for c in children(T))


def is_kripke_polynomial(T: Expr) -> bool:
    """Built from Id, Const, Sum, Tensor, Dual, Lower and Upper only."""
    if isinstance(T, (Id, Const)):
        return True
    if isinstance(T, (Sum, Tensor, Dual, Lower, Upper)):
        return all(is_kripke_polynomial(c) for c in children(T))
    return False


# ---------------------------------------------------------------------------
# V-subsets


def up_closure(A: VCat, phi) -> np.ndarray:
    """``phi_up(a) = join_{a'} phi(a') (x) A(a', a)``."""
    q = A.quantale
    row = mx.as_matrix(q, [list(phi)], (1, A.size))
    return mx.sup_tensor(q, row, A.hom)[0]


def down_closure(A: VCat, phi) -> np.ndarray:
    """``phi_down(a) = join_{a'} phi(a') (x) A(a, a')``."""
    q = A.quantale
    row = mx.as_matrix(q, [list(phi)], (1, A.size))
    return mx.sup_tensor(q, row, A.hom.T)[0]


def power_category(A: VCat, max_objects: int = DEFAULT_MAX_OBJECTS, prefix: str = "P") -> VCat:
    """All V-subsets of ``A`` with the Egli-Milner hom.

    ``PA(phi, psi) = meet_a [phi a, psi_down a] (x) meet_a [psi a, phi_up a]``.
    """
    q = A.quantale
    if not q.finite:
        raise VLiftError("presheaf constructions require a finite quantale")
    k = A.size
    count = (q.n + 1) ** k
    if count > max_objects:
        raise SizeGuardError(f"{count} V-subsets exceed the object cap {max_objects} (raise --max-objects)")
    tabs = np.array(list(itertools.product(range(q.n + 1), repeat=k)), dtype=np.int64).reshape(count, k)
    tabs.flags.writeable = False
    down = mx.sup_tensor(q, tabs, A.hom.T)
    up = mx.sup_tensor(q, tabs, A.hom)
    first = mx.inf_hom(q, tabs, down)
    second = mx.inf_hom(q, tabs, up).T
    hom = mx.pointwise_tensor(q, first, second)
    return VCat(q, tuple(table_label(q, prefix, r) for r in tabs), hom, tabs)


# ---------------------------------------------------------------------------
# the two non-BCC functors


def components(A: VCat) -> list[list[int]]:
    """Connected components of ``{(a, b) : I <= A(a, b)}``, ordered by least member."""
    q = A.quantale
    G = nx.Graph()
    G.add_nodes_from(range(A.size))
    for a in range(A.size):
        for b in range(A.size):
            if a != b and q.le(q.unit, A.hom[a, b]):
                G.add_edge(a, b)
    return sorted((sorted(c) for c in nx.connected_components(G)), key=lambda c: c[0])


def _component_labels(A: VCat, comps) -> tuple:
    return tuple("comp_" + "_".join(A.objects[i] for i in c) for c in comps)


def components_category(A: VCat) -> VCat:
    comps = components(A)
    q = A.quantale
    return VCat(q, _component_labels(A, comps), mx.diagonal(q, len(comps)))


def _triples(n: int) -> list[tuple]:
    return [t for t in itertools.product(range(n), repeat=3) if t[0] == t[1] or t[0] == t[2] or t[1] == t[2]]


def triple_diag_category(A: VCat) -> VCat:
    cube = tensor_product(tensor_product(A, A), A)
    n = A.size
    keep = [(i * n + j) * n + k for i, j, k in _triples(n)]
    sub = full_subcategory(cube, keep)
    labels = tuple(f"({A.objects[i]},{A.objects[j]},{A.objects[k]})" for i, j, k in _triples(n))
    return VCat(A.quantale, labels, sub.hom)


# ---------------------------------------------------------------------------
# evaluation


def apply_to_category(T: Expr, A: VCat, max_objects: int = DEFAULT_MAX_OBJECTS) -> VCat:
    """``TA``.  Results are memoised per ``(T, A, max_objects)``."""
    return _apply_cat(T, A, max_objects)


@lru_cache(maxsize=512)
def _apply_cat(T: Expr, A: VCat, max_objects: int) -> VCat:
    q = A.quantale
    if isinstance(T, _PRESHEAF_NODES) and not q.finite:
        raise VLiftError("presheaf constructions require a finite quantale")
    if isinstance(T, Id):
        return A
    if isinstance(T, Const):
        if T.X.quantale != q:
            raise ShapeError(f"constant category is over {T.X.quantale}, not {q}")
        return T.X
    if isinstance(T, Sum):
        L = _apply_cat(T.left, A, max_objects)
        R = _apply_cat(T.right, A, max_objects)
        lab_l, lab_r = coproduct_labels(L.objects, R.objects)
        hom = mx.block(q, [[L.hom, mx.bottoms(q, (L.size, R.size))], [mx.bottoms(q, (R.size, L.size)), R.hom]])
        return VCat(q, lab_l + lab_r, hom)
    if isinstance(T, Tensor):
        out = tensor_product(_apply_cat(T.left, A, max_objects), _apply_cat(T.right, A, max_objects))
        if out.size > max_objects:
            raise SizeGuardError(f"tensor has {out.size} objects, above the cap {max_objects}")
        return out
    if isinstance(T, Dual):
        return opposite(_apply_cat(T.inner, opposite(A), max_objects))
    if isinstance(T, Lower):
        return presheaf_category(_apply_cat(T.inner, A, max_objects), max_objects, "L")
    if isinstance(T, Upper):
        return copresheaf_category(_apply_cat(T.inner, A, max_objects), max_objects, "U")
    if isinstance(T, Power):
        return power_category(_apply_cat(T.inner, A, max_objects), max_objects, "P")
    if isinstance(T, ConnectedComponents):
        return components_category(A)
    if isinstance(T, TripleDiag):
        if len(_triples(A.size)) > max_objects:
            raise SizeGuardError(f"triple diagonal exceeds the object cap {max_objects}")
        return triple_diag_category(A)
    raise VLiftError(f"unknown functor expression {T!r}")


def apply_to_functor(T: Expr, f: VFunctor, max_objects: int = DEFAULT_MAX_OBJECTS) -> VFunctor:
    """``Tf: TA -> TB``."""
    q = f.quantale
    TA = apply_to_category(T, f.src, max_objects)
    TB = apply_to_category(T, f.dst, max_objects)
    if isinstance(T, Id):
        return f
    if isinstance(T, Const):
        return VFunctor(TA, TB, tuple(range(TA.size)))
    if isinstance(T, Sum):
        fl = apply_to_functor(T.left, f, max_objects)
        fr = apply_to_functor(T.right, f, max_objects)
        return VFunctor(TA, TB, fl.map + tuple(fl.dst.size + i for i in fr.map))
    if isinstance(T, Tensor):
        fl = apply_to_functor(T.left, f, max_objects)
        fr = apply_to_functor(T.right, f, max_objects)
        m = fr.dst.size
        return VFunctor(TA, TB, tuple(i * m + j for i in fl.map for j in fr.map))
    if isinstance(T, Dual):
        from .vcat import opposite_functor

        g = apply_to_functor(T.inner, opposite_functor(f), max_objects)
        return VFunctor(TA, TB, g.map)
    if isinstance(T, (Lower, Upper)):
        g = apply_to_functor(T.inner, f, max_objects)
        SB = g.dst
        # Lower: phi |-> (b |-> join_a phi a (x) SB(b, ga))
        # Upper: phi |-> (b |-> join_a phi a (x) SB(ga, b))
        weights = SB.hom[:, g.idx] if isinstance(T, Lower) else SB.hom[g.idx, :].T
        images = mx.sup_tensor(q, TA.tables, weights.T)
        return VFunctor(TA, TB, tuple(table_index(TB, r) for r in images))
    if isinstance(T, Power):
        g = apply_to_functor(T.inner, f, max_objects)
        images = np.zeros((TA.size, g.dst.size), dtype=np.int64)
        for a, b in enumerate(g.map):
            np.maximum(images[:, b], TA.tables[:, a], out=images[:, b])
        return VFunctor(TA, TB, tuple(table_index(TB, r) for r in images))
    if isinstance(T, ConnectedComponents):
        ca, cb = components(f.src), components(f.dst)
        where = {x: k for k, c in enumerate(cb) for x in c}
        return VFunctor(TA, TB, tuple(where[f.map[c[0]]] for c in ca))
    if isinstance(T, TripleDiag):
        pos = {t: k for k, t in enumerate(_triples(f.dst.size))}
        return VFunctor(TA, TB, tuple(pos[(f.map[i], f.map[j], f.map[k])] for i, j, k in _triples(f.src.size)))
    raise VLiftError(f"unknown functor expression {T!r}")


def check_local_monotonicity(T: Expr, f: VFunctor, g: VFunctor, max_objects: int = DEFAULT_MAX_OBJECTS) -> bool:
    """``Tf <= Tg`` given ``f <= g``."""
    if not functor_le(f, g):
        raise VLiftError("check_local_monotonicity needs f <= g")
    return functor_le(apply_to_functor(T, f, max_objects), apply_to_functor(T, g, max_objects))


def clear_cache() -> None:
    _apply_cat.cache_clear()


def kripke_polynomial_expressions(consts: list[Const], max_depth: int = 2) -> list[Expr]:
    """Every Kripke-polynomial expression up to ``max_depth`` over the given constants."""
    levels = [[Id(), *consts]]
    for _ in range(max_depth - 1):
        prev = [e for lvl in levels for e in lvl]
        new = []
        for e in prev:
            new.extend([Dual(e), Lower(e), Upper(e)])
        for a, b in itertools.product(prev, repeat=2):
            new.extend([Sum(a, b), Tensor(a, b)])
        seen = set(prev)
        levels.append([e for e in dict.fromkeys(new) if e not in seen])
    return [e for lvl in levels for e in lvl]


__all__ = [
    "Expr",
    "Id",
    "Const",
    "Sum",
    "Tensor",
    "Dual",
    "Lower",
    "Upper",
    "Power",
    "ConnectedComponents",
    "TripleDiag",
    "apply_to_category",
    "apply_to_functor",
    "check_local_monotonicity",
    "up_closure",
    "down_closure",
    "power_category",
    "components",
    "depth",
    "is_kripke_polynomial",
    "kripke_polynomial_expressions",
]
