"""Lax squares, exactness, cocommas, pushouts along fully faithful functors,
the surjective/fully-faithful factorisation and composition of collages.

A lax square is drawn as::

    P --p1--> B
    |         |
    p0   <=   g
    v         v
    A ---f--> C

and is lax when ``f p0 <= g p1``.  It is exact when
``C(fa, gb) = join_w A(a, p0 w) (x) B(p1 w, b)`` for all ``a, b``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrix as mx
from .report import ShapeError, VLiftError
from .vcat import (
    VCat,
    VFunctor,
    compose_functors,
    coproduct,
    ff_failure,
    glue,
    is_fully_faithful,
)
from .vmod import Collage


class NotLaxError(VLiftError):
    pass


@dataclass(frozen=True)
class LaxSquare:
    p0: VFunctor  # P -> A
    p1: VFunctor  # P -> B
    f: VFunctor  # A -> C
    g: VFunctor  # B -> C

    def __post_init__(self):
        if self.p0.src != self.p1.src:
            raise ShapeError("p0 and p1 need a common source")
        if self.p0.dst != self.f.src or self.p1.dst != self.g.src:
            raise ShapeError("square sides do not match")
        if self.f.dst != self.g.dst:
            raise ShapeError("f and g need a common target")

    @property
    def quantale(self):
        return self.f.quantale

    def lax_failure(self):
        """First ``w`` with ``not I <= C(f p0 w, g p1 w)``, or ``None``."""
        q = self.quantale
        C = self.f.dst
        for w in range(self.p0.src.size):
            v = C.hom[self.f.map[self.p0.map[w]], self.g.map[self.p1.map[w]]]
            if not q.le(q.unit, v):
                return self.p0.src.objects[w]
        return None

    def is_lax(self) -> bool:
        return self.lax_failure() is None

    def sides(self) -> tuple[np.ndarray, np.ndarray]:
        """``(lhs, rhs)`` indexed ``[a, b]``."""
        q = self.quantale
        A, B, C = self.f.src, self.g.src, self.f.dst
        lhs = mx.frozen(C.hom[np.ix_(self.f.idx, self.g.idx)].copy())
        rhs = mx.sup_tensor(q, A.hom[:, self.p0.idx], B.hom[self.p1.idx, :])
        return lhs, rhs

    def opposite(self) -> "LaxSquare":
        """The dual square: transpose the roles of ``p0/f`` and ``p1/g`` and take opposites."""
        from .vcat import opposite_functor

        return LaxSquare(
            opposite_functor(self.p1),
            opposite_functor(self.p0),
            opposite_functor(self.g),
            opposite_functor(self.f),
        )


@dataclass(frozen=True)
class Exactness:
    exact: bool
    lhs: np.ndarray
    rhs: np.ndarray
    witness: dict | None

    def to_dict(self) -> dict:
        return {"exact": self.exact, "witness": self.witness}


def is_exact(sq: LaxSquare) -> Exactness:
    """Compare both sides of the exactness equation; non-lax squares are rejected."""
    w = sq.lax_failure()
    if w is not None:
        raise NotLaxError(f"square is not lax at {w!r}")
    q = sq.quantale
    lhs, rhs = sq.sides()
    at = mx.first_difference(lhs, rhs)
    witness = None
    if at is not None:
        a, b = at
        witness = {
            "a": sq.f.src.objects[a],
            "b": sq.g.src.objects[b],
            "lhs": q.format(lhs[a, b]),
            "rhs": q.format(rhs[a, b]),
        }
    return Exactness(at is None, lhs, rhs, witness)


def near_exact_failure(sq: LaxSquare):
    """First ``(a, b)`` where ``rhs <= lhs`` fails (never, for a lax square)."""
    lhs, rhs = sq.sides()
    return mx.first_not_le(sq.quantale, rhs, lhs)


# ---------------------------------------------------------------------------
# cocomma objects


@dataclass(frozen=True)
class Cospan:
    apex: VCat
    i0: VFunctor
    i1: VFunctor


def cocomma(f: VFunctor, g: VFunctor) -> Cospan:
    """Cocomma of ``f: C -> A`` and ``g: C -> B``.

    Objects of ``A`` then ``B``; ``i0 a -> i1 b`` is
    ``join_c A(a, fc) (x) B(gc, b)`` and the reverse direction is bottom.
    """
    if f.src != g.src:
        raise ShapeError("cocomma needs a common source")
    q = f.quantale
    A, B = f.dst, g.dst
    cross = mx.sup_tensor(q, A.hom[:, f.idx], B.hom[g.idx, :])
    K = glue(q, A, B, cross)
    return Cospan(
        K,
        VFunctor(A, K, tuple(range(A.size))),
        VFunctor(B, K, tuple(range(A.size, A.size + B.size))),
    )


def cocomma_square(f: VFunctor, g: VFunctor) -> LaxSquare:
    c = cocomma(f, g)
    return LaxSquare(f, g, c.i0, c.i1)


# ---------------------------------------------------------------------------
# pushout along a fully faithful functor


def pushout_along_ff(j: VFunctor, f: VFunctor) -> Cospan:
    """Pushout of ``j: A -> B`` (fully faithful) and ``f: A -> C``.

    Returns the apex ``P`` with ``i0: C -> P`` and ``i1: B -> P``.  Objects
    are those of ``C`` followed by the objects of ``B`` outside the image of
    ``j``.  Between two such objects the hom is
    ``B(b,b') v join_{a,a'} B(b,ja) (x) C(fa,fa') (x) B(ja',b')``.
    """
    if j.src != f.src:
        raise ShapeError("pushout needs a common source")
    bad = ff_failure(j)
    if bad is not None:
        raise VLiftError(f"pushout_along_ff: j is not fully faithful at {bad}")
    q = j.quantale
    B, C = j.dst, f.dst
    image = set(j.map)
    rest = [b for b in range(B.size) if b not in image]
    Bj = B.hom[:, j.idx]  # [b, a] = B(b, ja)
    jB = B.hom[j.idx, :]  # [a, b] = B(ja, b)
    Cf = C.hom[:, f.idx]  # [c, a] = C(c, fa)
    fC = C.hom[f.idx, :]  # [a, c] = C(fa, c)
    p_cb = mx.sup_tensor(q, Cf, jB[:, rest])
    p_bc = mx.sup_tensor(q, Bj[rest, :], fC)
    ff = C.hom[np.ix_(f.idx, f.idx)]
    p_bb = mx.sup_tensor(q, mx.sup_tensor(q, Bj[rest, :], ff), jB[:, rest])
    p_bb = mx.pointwise_join(q, B.hom[np.ix_(rest, rest)], p_bb)
    Brest = VCat(q, tuple(B.objects[b] for b in rest), p_bb)
    P = glue(q, C, Brest, p_cb, p_bc)
    i0 = VFunctor(C, P, tuple(range(C.size)))
    first = {}
    for a, b in enumerate(j.map):
        first.setdefault(b, a)
    pos = {b: C.size + k for k, b in enumerate(rest)}
    i1 = VFunctor(B, P, tuple(pos[b] if b in pos else f.map[first[b]] for b in range(B.size)))
    return Cospan(P, i0, i1)


# ---------------------------------------------------------------------------
# factorisation


@dataclass(frozen=True)
class Factorisation:
    e: VFunctor  # A -> C, identity on objects
    j: VFunctor  # C -> B, fully faithful


def factorize(f: VFunctor) -> Factorisation:
    """``f = j . e`` with ``C`` on the objects of ``A`` and homs ``B(fa, fa')``."""
    q = f.quantale
    A, B = f.src, f.dst
    Cm = VCat(q, A.objects, mx.frozen(B.hom[np.ix_(f.idx, f.idx)].copy()))
    return Factorisation(VFunctor(A, Cm, tuple(range(A.size))), VFunctor(Cm, B, f.map))


# ---------------------------------------------------------------------------
# composition of collages


def compose_collages(s_coll: Collage, r_coll: Collage, route: str = "pushout") -> Collage:
    """Collage of ``S . R`` from the collages of ``R: A -|-> B`` and ``S: B -|-> C``.

    ``route="pushout"`` glues the two collages along ``B`` by a pushout;
    ``route="cocomma"`` uses the cocomma of the two legs out of ``B``.
    """
    if s_coll.i1.src != r_coll.i0.src:
        raise ShapeError("collages do not share the middle category")
    if route == "pushout":
        po = pushout_along_ff(r_coll.i0, s_coll.i1)
        to_s, to_r = po.i0, po.i1
    elif route == "cocomma":
        cc = cocomma(s_coll.i1, r_coll.i0)
        to_s, to_r = cc.i0, cc.i1
    else:
        raise VLiftError(f"unknown route {route!r} (use pushout or cocomma)")
    Cc = s_coll.i0.src
    Aa = r_coll.i1.src
    leg_c = compose_functors(to_s, s_coll.i0)
    leg_a = compose_functors(to_r, r_coll.i1)
    domain = coproduct(Cc, Aa)
    pair = VFunctor(domain, leg_c.dst, leg_c.map + leg_a.map)
    fac = factorize(pair)
    K = fac.j.src
    if not is_fully_faithful(fac.j):  # pragma: no cover - guaranteed by construction
        raise AssertionError("factorisation produced a non fully faithful part")
    return Collage(
        K,
        VFunctor(Cc, K, tuple(range(Cc.size))),
        VFunctor(Aa, K, tuple(range(Cc.size, Cc.size + Aa.size))),
    )
