"""Finite V-categories and V-functors.

A :class:`VCat` stores its objects as an ordered tuple of string labels and
its homs as a square matrix with ``hom[a, b] = A(a, b)`` (row = source,
column = target).  A :class:`VFunctor` stores its object map as a tuple of
target indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import matrix as mx
from .quantale import Quantale
from .report import DEFAULT_MAX_OBJECTS, Report, ShapeError, SizeGuardError, VLiftError


@dataclass(frozen=True, eq=False)
class VCat:
    quantale: Quantale
    objects: tuple
    hom: np.ndarray
    # value tables of the objects when they are V-valued maps (presheaf,
    # copresheaf and power categories); row i decodes object i
    tables: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        objs = tuple(str(o) for o in self.objects)
        object.__setattr__(self, "objects", objs)
        if len(set(objs)) != len(objs):
            dup = sorted({o for o in objs if objs.count(o) > 1})
            raise VLiftError(f"duplicate object labels: {dup}")
        n = len(objs)
        if self.hom.shape != (n, n):
            raise ShapeError(f"hom matrix has shape {self.hom.shape}, expected {(n, n)}")
        self.hom.flags.writeable = False

    @property
    def size(self) -> int:
        return len(self.objects)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise VLiftError(f"unknown object {label!r}") from None

    @property
    def _index(self) -> dict:
        d = self.__dict__.get("_idx")
        if d is None:
            d = {o: i for i, o in enumerate(self.objects)}
            object.__setattr__(self, "_idx", d)
        return d

    def __call__(self, a: str, b: str):
        return self.hom[self.index(a), self.index(b)]

    def _key(self):
        return (self.quantale, self.objects, mx.key(self.hom))

    def __eq__(self, other):
        return isinstance(other, VCat) and self._key() == other._key()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"VCat({self.quantale}, {list(self.objects)})"


def make_category(q: Quantale, objects: Sequence, hom) -> VCat:
    """Build a category from raw values; call :func:`validate_category` to check axioms."""
    n = len(objects)
    return VCat(q, tuple(objects), mx.as_matrix(q, hom, (n, n)))


def unit_category(q: Quantale, label: str = "*") -> VCat:
    return VCat(q, (label,), mx.full(q, (1, 1), q.unit))


def discrete_category(q: Quantale, objects: Sequence) -> VCat:
    return VCat(q, tuple(objects), mx.diagonal(q, len(objects)))


def indiscrete_category(q: Quantale, objects: Sequence) -> VCat:
    """Every hom is ``I``."""
    n = len(objects)
    return VCat(q, tuple(objects), mx.full(q, (n, n), q.unit))


def validate_category(A: VCat) -> Report:
    q = A.quantale
    rep = Report(f"category {list(A.objects)}")
    n = A.size
    rep.count(n + n**3)
    for a in range(n):
        if not q.le(q.unit, A.hom[a, a]):
            rep.fail("identity", a=A.objects[a], value=q.format(A.hom[a, a]))
    if q.finite:
        T = q.tensor_table
        for a in range(n):
            comp = T[A.hom, A.hom[a, :, None]]  # [b, c] = A(b,c) (x) A(a,b)
            for b, c in np.argwhere(comp > A.hom[a][None, :]):
                _composition_failure(rep, A, a, int(b), int(c), comp[b, c])
    else:
        for a, b, c in itertools.product(range(n), repeat=3):
            lhs = q.tensor(A.hom[b, c], A.hom[a, b])
            if not q.le(lhs, A.hom[a, c]):
                _composition_failure(rep, A, a, b, c, lhs)
    return rep


def _composition_failure(rep, A, a, b, c, lhs):
    q = A.quantale
    rep.fail(
        "composition",
        a=A.objects[a],
        b=A.objects[b],
        c=A.objects[c],
        lhs=q.format(lhs),
        rhs=q.format(A.hom[a, c]),
    )


def is_category(A: VCat) -> bool:
    return mx.category_violation(A.quantale, A.hom) is None


def _same_quantale(*cats: VCat) -> Quantale:
    q = cats[0].quantale
    for c in cats[1:]:
        if c.quantale != q:
            raise ShapeError(f"quantale mismatch: {q} vs {c.quantale}")
    return q


# ---------------------------------------------------------------------------
# constructions


def opposite(A: VCat) -> VCat:
    return VCat(A.quantale, A.objects, mx.frozen(A.hom.T.copy()), A.tables)


def tensor_product(A: VCat, B: VCat) -> VCat:
    """Objects ``(a,b)`` in ``a``-major order, homs pointwise tensor."""
    q = _same_quantale(A, B)
    objs = tuple(f"({a},{b})" for a in A.objects for b in B.objects)
    n, m = A.size, B.size
    left = np.repeat(np.repeat(A.hom, m, axis=0), m, axis=1)
    right = np.tile(B.hom, (n, n))
    return VCat(q, objs, mx.pointwise_tensor(q, left, right))


def coproduct_labels(left: Sequence[str], right: Sequence[str]) -> tuple[tuple, tuple]:
    """Labels for a disjoint union; colliding labels get ``L.``/``R.`` prefixes."""
    clash = set(left) & set(right)
    if not clash:
        return tuple(left), tuple(right)
    lab_l = tuple(f"L.{x}" if x in clash else x for x in left)
    lab_r = tuple(f"R.{x}" if x in clash else x for x in right)
    if len(set(lab_l) | set(lab_r)) != len(lab_l) + len(lab_r):
        lab_l = tuple(f"L.{x}" for x in left)
        lab_r = tuple(f"R.{x}" for x in right)
    return lab_l, lab_r


def glue(q: Quantale, left: VCat, right: VCat, cross: np.ndarray, back: np.ndarray | None = None) -> VCat:
    """Objects of ``left`` then ``right`` with the given cross blocks.

    ``cross[l, r]`` is the hom from a left object to a right object and
    ``back`` the reverse direction (``bottom`` when omitted).
    """
    if back is None:
        back = mx.bottoms(q, (right.size, left.size))
    lab_l, lab_r = coproduct_labels(left.objects, right.objects)
    hom = mx.block(q, [[left.hom, cross], [back, right.hom]])
    return VCat(q, lab_l + lab_r, hom)


def coproduct(A: VCat, B: VCat) -> VCat:
    q = _same_quantale(A, B)
    return glue(q, A, B, mx.bottoms(q, (A.size, B.size)))


def discrete(A: VCat) -> VCat:
    return VCat(A.quantale, A.objects, mx.diagonal(A.quantale, A.size), A.tables)


def full_subcategory(A: VCat, indices: Sequence[int]) -> VCat:
    idx = list(indices)
    sub = None if A.tables is None else A.tables[idx]
    return VCat(A.quantale, tuple(A.objects[i] for i in idx), mx.frozen(A.hom[np.ix_(idx, idx)].copy()), sub)


def tensor_two(A: VCat) -> VCat:
    """Tensor of ``A`` with the two-element chain.

    Objects ``(0,a)`` then ``(1,a)``; ``(0,a) -> (1,a')`` is ``I`` and
    ``(1,a) -> (0,a')`` is ``bottom``.
    """
    q = A.quantale
    n = A.size
    objs = tuple(f"(0,{a})" for a in A.objects) + tuple(f"(1,{a})" for a in A.objects)
    hom = mx.block(q, [[A.hom, mx.full(q, (n, n), q.unit)], [mx.bottoms(q, (n, n)), A.hom]])
    return VCat(q, objs, hom)


# ---------------------------------------------------------------------------
# preorders


@dataclass(frozen=True)
class Preorder:
    objects: tuple
    relation: frozenset  # pairs (a, b) of labels meaning a <= b

    def le(self, a, b) -> bool:
        return (a, b) in self.relation


def preorder_closure(objects: Sequence, pairs: Iterable) -> Preorder:
    """Reflexive-transitive closure of ``pairs``."""
    objs = tuple(str(o) for o in objects)
    n = len(objs)
    pos = {o: i for i, o in enumerate(objs)}
    m = np.eye(n, dtype=bool)
    for a, b in pairs:
        if a not in pos or b not in pos:
            raise VLiftError(f"preorder pair ({a!r}, {b!r}) names an unknown object")
        m[pos[a], pos[b]] = True
    for k in range(n):
        m |= m[:, k : k + 1] & m[k : k + 1, :]
    rel = frozenset((objs[i], objs[j]) for i, j in zip(*np.nonzero(m)))
    return Preorder(objs, rel)


def underlying_preorder(A: VCat) -> Preorder:
    q = A.quantale
    rel = frozenset(
        (A.objects[i], A.objects[j])
        for i in range(A.size)
        for j in range(A.size)
        if q.le(q.unit, A.hom[i, j])
    )
    return Preorder(A.objects, rel)


def free_on_preorder(q: Quantale, P: Preorder) -> VCat:
    closed = preorder_closure(P.objects, P.relation)
    if closed.relation != frozenset(P.relation):
        raise VLiftError("relation is not a preorder (not reflexive and transitive)")
    n = len(P.objects)
    hom = mx.bottoms(q, (n, n)).copy()
    for i, a in enumerate(P.objects):
        for j, b in enumerate(P.objects):
            if (a, b) in P.relation:
                hom[i, j] = q.unit
    return VCat(q, P.objects, mx.frozen(hom))


def chain_category(q: Quantale, objects: Sequence) -> VCat:
    """Free category on the total order listed by ``objects``."""
    pairs = [(a, b) for i, a in enumerate(objects) for b in objects[i:]]
    return free_on_preorder(q, preorder_closure(objects, pairs))


# ---------------------------------------------------------------------------
# functors


@dataclass(frozen=True, eq=False)
class VFunctor:
    src: VCat
    dst: VCat
    map: tuple

    def __post_init__(self):
        m = tuple(int(i) for i in self.map)
        object.__setattr__(self, "map", m)
        if self.src.quantale != self.dst.quantale:
            raise ShapeError(f"quantale mismatch: {self.src.quantale} vs {self.dst.quantale}")
        if len(m) != self.src.size:
            raise ShapeError(f"object map has {len(m)} entries for {self.src.size} objects")
        if any(i < 0 or i >= self.dst.size for i in m):
            raise ShapeError("object map leaves the target category")

    @property
    def quantale(self) -> Quantale:
        return self.src.quantale

    @property
    def idx(self) -> np.ndarray:
        return np.asarray(self.map, dtype=np.int64)

    def label_map(self) -> dict:
        return {a: self.dst.objects[i] for a, i in zip(self.src.objects, self.map)}

    def __call__(self, label: str) -> str:
        return self.dst.objects[self.map[self.src.index(label)]]

    def _key(self):
        return (self.src, self.dst, self.map)

    def __eq__(self, other):
        return isinstance(other, VFunctor) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"VFunctor({self.label_map()})"


def make_functor(src: VCat, dst: VCat, mapping) -> VFunctor:
    """``mapping`` is a label dict or a sequence of target labels/indices."""
    if isinstance(mapping, Mapping):
        missing = [a for a in src.objects if a not in mapping]
        if missing:
            raise VLiftError(f"object map is missing {missing}")
        extra = [a for a in mapping if a not in src._index]
        if extra:
            raise VLiftError(f"object map names unknown objects {extra}")
        return VFunctor(src, dst, tuple(dst.index(str(mapping[a])) for a in src.objects))
    out = []
    for t in mapping:
        out.append(dst.index(t) if isinstance(t, str) else int(t))
    return VFunctor(src, dst, tuple(out))


def validate_functor(f: VFunctor) -> Report:
    q = f.quantale
    rep = Report(f"functor {f.label_map()}")
    image = f.dst.hom[np.ix_(f.idx, f.idx)]
    rep.count(f.src.size**2)
    for a, b in _not_le_pairs(q, f.src.hom, image):
        rep.fail(
            "hom_inequality",
            a=f.src.objects[a],
            b=f.src.objects[b],
            src_value=q.format(f.src.hom[a, b]),
            dst_value=q.format(image[a, b]),
        )
    return rep


def _not_le_pairs(q: Quantale, x: np.ndarray, y: np.ndarray):
    if q.finite:
        return [(int(a), int(b)) for a, b in np.argwhere(x > y)]
    return [idx for idx in np.ndindex(*x.shape) if not q.le(x[idx], y[idx])]


def is_functor(f: VFunctor) -> bool:
    return mx.le_all(f.quantale, f.src.hom, f.dst.hom[np.ix_(f.idx, f.idx)])


def identity_functor(A: VCat) -> VFunctor:
    return VFunctor(A, A, tuple(range(A.size)))


def compose_functors(g: VFunctor, f: VFunctor) -> VFunctor:
    """``g . f``."""
    if f.dst != g.src:
        raise ShapeError("functors are not composable")
    return VFunctor(f.src, g.dst, tuple(g.map[i] for i in f.map))


def opposite_functor(f: VFunctor) -> VFunctor:
    return VFunctor(opposite(f.src), opposite(f.dst), f.map)


def constant_functor(A: VCat, B: VCat, target: str | int) -> VFunctor:
    t = B.index(target) if isinstance(target, str) else int(target)
    return VFunctor(A, B, (t,) * A.size)


def _check_parallel(f: VFunctor, g: VFunctor):
    if f.src != g.src or f.dst != g.dst:
        raise ShapeError("functors are not parallel")


def functor_le(f: VFunctor, g: VFunctor) -> bool:
    """``f <= g``: ``I <= B(fa, ga)`` for every ``a``."""
    _check_parallel(f, g)
    q = f.quantale
    return all(q.le(q.unit, f.dst.hom[i, j]) for i, j in zip(f.map, g.map))


def is_fully_faithful(f: VFunctor) -> bool:
    return mx.equal(f.src.hom, f.dst.hom[np.ix_(f.idx, f.idx)])


def ff_failure(f: VFunctor):
    """First pair ``(a, a')`` with ``A(a,a') != B(fa,fa')`` or ``None``."""
    at = mx.first_difference(f.src.hom, f.dst.hom[np.ix_(f.idx, f.idx)])
    if at is None:
        return None
    a, b = at
    q = f.quantale
    return {
        "a": f.src.objects[a],
        "b": f.src.objects[b],
        "fa": f.dst.objects[f.map[a]],
        "fb": f.dst.objects[f.map[b]],
        "src_value": q.format(f.src.hom[a, b]),
        "dst_value": q.format(f.dst.hom[f.map[a], f.map[b]]),
    }


def is_surjective_on_objects(f: VFunctor) -> bool:
    return set(f.map) == set(range(f.dst.size))


def tensor_two_functor(f: VFunctor) -> VFunctor:
    n = f.dst.size
    return VFunctor(tensor_two(f.src), tensor_two(f.dst), f.map + tuple(i + n for i in f.map))


def all_functors(A: VCat, B: VCat, limit: int | None = None):
    """Every V-functor ``A -> B`` in lexicographic order of object maps."""
    if limit is not None and B.size**A.size > limit:
        raise SizeGuardError(f"{B.size}^{A.size} candidate object maps exceed the cap {limit}")
    for m in itertools.product(range(B.size), repeat=A.size):
        f = VFunctor(A, B, m)
        if is_functor(f):
            yield f


# ---------------------------------------------------------------------------
# V-valued maps and presheaf categories


def enumerate_functor_tables(q: Quantale, C: np.ndarray, max_objects: int = DEFAULT_MAX_OBJECTS) -> np.ndarray:
    """All ``phi`` with ``C[i, j] (x) phi[i] <= phi[j]``, lexicographically.

    ``C`` is the hom matrix of a category, so the rows returned are the
    V-functors from it into V.  Built position by position; every prefix is
    itself a V-functor on a full subcategory, and each extends, so the
    intermediate counts never exceed the final one.
    """
    if not q.finite:
        raise VLiftError("presheaf constructions require a finite quantale")
    k = C.shape[0]
    T = q.tensor_table
    vals = np.arange(q.n + 1, dtype=np.int64)
    tables = np.zeros((1, 0), dtype=np.int64)
    for p in range(k):
        rows = np.repeat(tables, len(vals), axis=0)
        new = np.tile(vals, len(tables))
        ok = np.ones(len(new), dtype=bool)
        for i in range(p):
            ok &= T[C[i, p], rows[:, i]] <= new
            ok &= T[C[p, i], new] <= rows[:, i]
        ok &= T[C[p, p], new] <= new
        tables = np.column_stack([rows[ok], new[ok]]) if p else new[ok, None]
        if len(tables) > max_objects:
            raise SizeGuardError(
                f"enumeration exceeds the object cap {max_objects} (raise --max-objects)"
            )
    tables.flags.writeable = False
    return tables


def table_label(q: Quantale, prefix: str, row) -> str:
    return f"{prefix}[{','.join(q.format(v) for v in row)}]"


def presheaf_category(A: VCat, max_objects: int = DEFAULT_MAX_OBJECTS, prefix: str = "L") -> VCat:
    """``[A^op, V]``: tables with ``A(a',a) (x) phi(a) <= phi(a')``."""
    q = A.quantale
    tabs = enumerate_functor_tables(q, A.hom.T, max_objects)
    hom = mx.inf_hom(q, tabs, tabs)
    return VCat(q, tuple(table_label(q, prefix, r) for r in tabs), hom, tabs)


def copresheaf_category(A: VCat, max_objects: int = DEFAULT_MAX_OBJECTS, prefix: str = "U") -> VCat:
    """``[A, V]^op``: covariant tables, hom ``meet_a [psi a, phi a]``."""
    q = A.quantale
    tabs = enumerate_functor_tables(q, A.hom, max_objects)
    hom = mx.frozen(mx.inf_hom(q, tabs, tabs).T.copy())
    return VCat(q, tuple(table_label(q, prefix, r) for r in tabs), hom, tabs)


def table_index(C: VCat, row) -> int:
    """Position of the object of ``C`` whose table is ``row``."""
    if C.tables is None:
        raise VLiftError("category has no object tables")
    lookup = C.__dict__.get("_tindex")
    if lookup is None:
        lookup = {tuple(int(v) for v in r): i for i, r in enumerate(C.tables)}
        object.__setattr__(C, "_tindex", lookup)
    key = tuple(int(v) for v in row)
    try:
        return lookup[key]
    except KeyError:
        raise VLiftError(f"table {list(key)} is not an object of the category") from None
