"""Modules (V-valued relations), graphs of functors and collages.

A module ``R: A -|-> B`` is a matrix with rows indexed by ``B`` and columns
by ``A``: ``matrix[b, a] = R(b, a)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrix as mx
from .report import DEFAULT_MAX_OBJECTS, Report, ShapeError, VLiftError
from .vcat import (
    VCat,
    VFunctor,
    glue,
    presheaf_category,
    table_index,
)


@dataclass(frozen=True, eq=False)
class Module:
    src: VCat
    dst: VCat
    matrix: np.ndarray

    def __post_init__(self):
        if self.src.quantale != self.dst.quantale:
            raise ShapeError(f"quantale mismatch: {self.src.quantale} vs {self.dst.quantale}")
        shape = (self.dst.size, self.src.size)
        if self.matrix.shape != shape:
            raise ShapeError(f"module matrix has shape {self.matrix.shape}, expected {shape}")
        self.matrix.flags.writeable = False

    @property
    def quantale(self):
        return self.src.quantale

    def __call__(self, b: str, a: str):
        return self.matrix[self.dst.index(b), self.src.index(a)]

    def _key(self):
        return (self.src, self.dst, mx.key(self.matrix))

    def __eq__(self, other):
        return isinstance(other, Module) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __le__(self, other: "Module") -> bool:
        _check_parallel(self, other)
        return mx.le_all(self.quantale, self.matrix, other.matrix)

    def __repr__(self):
        return f"Module({list(self.src.objects)} -|-> {list(self.dst.objects)})"


def _check_parallel(R: Module, S: Module):
    if R.src != S.src or R.dst != S.dst:
        raise ShapeError("modules are not parallel")


def make_module(A: VCat, B: VCat, rows) -> Module:
    """Module ``A -|-> B`` from raw rows (one row per object of ``B``)."""
    return Module(A, B, mx.as_matrix(A.quantale, rows, (B.size, A.size)))


def validate_module(R: Module) -> Report:
    q = R.quantale
    A, B, M = R.src, R.dst, R.matrix
    rep = Report(f"module {list(A.objects)} -|-> {list(B.objects)}")
    left = mx.sup_tensor(q, B.hom, M)  # join_b B(b',b) (x) R(b,a)
    right = mx.sup_tensor(q, M, A.hom)  # join_a R(b,a) (x) A(a,a')
    rep.count(2 * M.size)
    for name, act in (("left_action", left), ("right_action", right)):
        for idx in np.ndindex(*M.shape):
            if not q.le(act[idx], M[idx]):
                b, a = idx
                rep.fail(name, b=B.objects[b], a=A.objects[a], action=q.format(act[idx]), value=q.format(M[idx]))
    return rep


def is_module(R: Module) -> bool:
    return validate_module(R).ok


def bimodule_closure(A: VCat, B: VCat, rows) -> Module:
    """Least module above the raw matrix: ``join B(b,b') (x) M(b',a') (x) A(a',a)``."""
    q = A.quantale
    M = rows if isinstance(rows, np.ndarray) else mx.as_matrix(q, rows, (B.size, A.size))
    return Module(A, B, mx.sup_tensor(q, mx.sup_tensor(q, B.hom, M), A.hom))


def compose(S: Module, R: Module) -> Module:
    """``S . R`` for ``R: A -|-> B`` and ``S: B -|-> C``."""
    if R.dst != S.src:
        raise ShapeError("middle categories differ")
    return Module(R.src, S.dst, mx.sup_tensor(R.quantale, S.matrix, R.matrix))


def identity_module(A: VCat) -> Module:
    return Module(A, A, A.hom)


def graph_lower(f: VFunctor) -> Module:
    """``f_<>: A -|-> B`` with entries ``B(b, fa)``."""
    return Module(f.src, f.dst, mx.frozen(f.dst.hom[:, f.idx].copy()))


def graph_upper(f: VFunctor) -> Module:
    """``f^<>: B -|-> A`` with entries ``B(fa, b)``."""
    return Module(f.dst, f.src, mx.frozen(f.dst.hom[f.idx, :].copy()))


def check_graph_adjunction(f: VFunctor) -> Report:
    """Unit ``A <= f^<> . f_<>`` and counit ``f_<> . f^<> <= B``."""
    q = f.quantale
    rep = Report("graph adjunction")
    unit = compose(graph_upper(f), graph_lower(f)).matrix
    counit = compose(graph_lower(f), graph_upper(f)).matrix
    rep.count(unit.size + counit.size)
    at = mx.first_not_le(q, f.src.hom, unit)
    if at is not None:
        rep.fail("unit", a=f.src.objects[at[0]], b=f.src.objects[at[1]])
    at = mx.first_not_le(q, counit, f.dst.hom)
    if at is not None:
        rep.fail("counit", a=f.dst.objects[at[0]], b=f.dst.objects[at[1]])
    rep.info["unit_is_iso"] = mx.equal(unit, f.src.hom)
    return rep


# ---------------------------------------------------------------------------
# collages


@dataclass(frozen=True, eq=False)
class Collage:
    """``coll`` has the objects of ``B`` first, then those of ``A``."""

    coll: VCat
    i0: VFunctor  # B -> coll
    i1: VFunctor  # A -> coll

    def _key(self):
        return (self.coll, self.i0, self.i1)

    def __eq__(self, other):
        return isinstance(other, Collage) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def collage(R: Module) -> Collage:
    A, B = R.src, R.dst
    K = glue(R.quantale, B, A, R.matrix)
    nb = B.size
    return Collage(K, VFunctor(B, K, tuple(range(nb))), VFunctor(A, K, tuple(range(nb, nb + A.size))))


def module_of_cospan(i0: VFunctor, i1: VFunctor) -> Module:
    """``(i0)^<> . (i1)_<>``, a module ``A -|-> B`` for ``i0: B -> K``, ``i1: A -> K``."""
    if i0.dst != i1.dst:
        raise ShapeError("cospan legs have different targets")
    return compose(graph_upper(i0), graph_lower(i1))


def module_of_collage(c: Collage) -> Module:
    return module_of_cospan(c.i0, c.i1)


# ---------------------------------------------------------------------------
# presheaf plumbing


def yoneda(A: VCat, LA: VCat | None = None, max_objects: int = DEFAULT_MAX_OBJECTS) -> VFunctor:
    """``a |-> A(-, a)`` into the presheaf category."""
    LA = LA or presheaf_category(A, max_objects)
    return VFunctor(A, LA, tuple(table_index(LA, A.hom[:, a]) for a in range(A.size)))


def evaluation_module(A: VCat, LA: VCat | None = None, max_objects: int = DEFAULT_MAX_OBJECTS) -> Module:
    """``ev_A: [A^op,V] -|-> A`` with ``ev(a, phi) = phi(a)``."""
    LA = LA or presheaf_category(A, max_objects)
    return Module(LA, A, mx.frozen(np.ascontiguousarray(LA.tables.T)))


def module_dagger(
    R: Module,
    LA: VCat | None = None,
    LB: VCat | None = None,
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> VFunctor:
    """``R^dagger(phi)(b) = join_a phi(a) (x) R(b, a)``."""
    q = R.quantale
    if not q.finite:
        raise VLiftError("presheaf constructions require a finite quantale")
    LA = LA or presheaf_category(R.src, max_objects)
    LB = LB or presheaf_category(R.dst, max_objects)
    images = mx.sup_tensor(q, LA.tables, R.matrix.T)
    return VFunctor(LA, LB, tuple(table_index(LB, row) for row in images))
