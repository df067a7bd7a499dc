"""Relation lifting, closed forms for L/U/P, falsification batteries and
distributive laws over the presheaf construction.

The generic lifting of a module ``R: A -|-> B`` along an endofunctor ``T``
reads the hom block of ``T`` applied to the collage::

    Tbar(R)(y, x) = T(Coll R)(T i0 (y), T i1 (x))     y in TB, x in TA
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import matrix as mx
from .endo import Expr, Lower, Power, Upper, apply_to_category, apply_to_functor
from .report import DEFAULT_MAX_OBJECTS, Report, SizeGuardError, VLiftError
from .squares import LaxSquare, cocomma, is_exact
from .vcat import (
    VCat,
    VFunctor,
    ff_failure,
    table_index,
    validate_functor,
)
from .vmod import (
    Module,
    collage,
    compose,
    graph_lower,
    graph_upper,
    identity_module,
    yoneda,
)


def lift_via_collage(T: Expr, R: Module, max_objects: int = DEFAULT_MAX_OBJECTS) -> Module:
    c = collage(R)
    TK = apply_to_category(T, c.coll, max_objects)
    ti0 = apply_to_functor(T, c.i0, max_objects)  # TB -> TK
    ti1 = apply_to_functor(T, c.i1, max_objects)  # TA -> TK
    block = TK.hom[np.ix_(ti0.idx, ti1.idx)]
    return Module(ti1.src, ti0.src, mx.frozen(block.copy()))


def _lower_part(q, R: Module, ta: np.ndarray, tb: np.ndarray) -> np.ndarray:
    # [y, x] = meet_b [y(b), join_a R(b, a) (x) x(a)]
    inner = mx.sup_tensor(q, ta, R.matrix.T)
    return mx.inf_hom(q, tb, inner)


def _upper_part(q, R: Module, ta: np.ndarray, tb: np.ndarray) -> np.ndarray:
    # [y, x] = meet_a [x(a), join_b R(b, a) (x) y(b)]
    inner = mx.sup_tensor(q, tb, R.matrix)
    return mx.frozen(mx.inf_hom(q, ta, inner).T.copy())


def lift_closed_form(which: str, R: Module, max_objects: int = DEFAULT_MAX_OBJECTS) -> Module:
    """Closed-form lifting for ``which`` in ``{"L", "U", "P"}``.

    For ``P`` the two halves are combined with the tensor, which is the meet
    whenever the tensor is idempotent.
    """
    q = R.quantale
    if not q.finite:
        raise VLiftError("presheaf constructions require a finite quantale")
    node = {"L": Lower(), "U": Upper(), "P": Power()}.get(which)
    if node is None:
        raise VLiftError(f"closed-form lifting exists for L, U and P, not {which!r}")
    TA = apply_to_category(node, R.src, max_objects)
    TB = apply_to_category(node, R.dst, max_objects)
    ta, tb = TA.tables, TB.tables
    if which == "L":
        m = _lower_part(q, R, ta, tb)
    elif which == "U":
        m = _upper_part(q, R, ta, tb)
    else:
        m = mx.pointwise_tensor(q, _lower_part(q, R, ta, tb), _upper_part(q, R, ta, tb))
    return Module(TA, TB, m)


def lift(T: Expr, R: Module, max_objects: int = DEFAULT_MAX_OBJECTS) -> Module:
    """Closed form for bare ``L``/``U``/``P``, collage route otherwise."""
    from .endo import Id

    for name, cls in (("L", Lower), ("U", Upper), ("P", Power)):
        if isinstance(T, cls) and isinstance(T.inner, Id):
            return lift_closed_form(name, R, max_objects)
    return lift_via_collage(T, R, max_objects)


# ---------------------------------------------------------------------------
# batteries


def _module_witness(X: Module, Y: Module) -> dict | None:
    at = mx.first_difference(X.matrix, Y.matrix)
    if at is None:
        return None
    q = X.quantale
    y, x = at
    return {
        "row": X.dst.objects[y],
        "col": X.src.objects[x],
        "got": q.format(X.matrix[y, x]),
        "expected": q.format(Y.matrix[y, x]),
    }


def functoriality_battery(
    T: Expr,
    pairs: Iterable[tuple[Module, Module]] = (),
    functors: Iterable[VFunctor] = (),
    max_objects: int = DEFAULT_MAX_OBJECTS,
    categories: Iterable[VCat] | None = None,
) -> Report:
    """Identity, composition and extension equalities of the collage lifting.

    ``pairs`` holds composable ``(S, R)``; ``functors`` the samples for
    ``Tbar(f_<>) = (Tf)_<>``.  Identity checks run on ``categories`` when
    given, otherwise on every category met in ``pairs``.  Passing never
    certifies a lifting; failing witnesses that none exists.
    """
    rep = Report(f"functoriality {T}")
    seen = set()
    explicit = categories is not None

    def identity(A: VCat):
        if A in seen:
            return
        seen.add(A)
        rep.count()
        got = lift_via_collage(T, identity_module(A), max_objects)
        want = identity_module(apply_to_category(T, A, max_objects))
        w = _module_witness(got, want)
        if w is not None:
            rep.fail("identity", category=list(A.objects), **w)

    for A in categories or ():
        identity(A)
    for S, R in pairs:
        if not explicit:
            for A in (R.src, R.dst, S.dst):
                identity(A)
        rep.count()
        got = lift_via_collage(T, compose(S, R), max_objects)
        want = compose(lift_via_collage(T, S, max_objects), lift_via_collage(T, R, max_objects))
        w = _module_witness(got, want)
        if w is not None:
            rep.fail("composition", **w)
    for f in functors:
        rep.count()
        got = lift_via_collage(T, graph_lower(f), max_objects)
        want = graph_lower(apply_to_functor(T, f, max_objects))
        w = _module_witness(got, want)
        if w is not None:
            rep.fail("extension", functor=f.label_map(), **w)
    return rep


def image_square(T: Expr, sq: LaxSquare, max_objects: int = DEFAULT_MAX_OBJECTS) -> LaxSquare:
    return LaxSquare(*(apply_to_functor(T, h, max_objects) for h in (sq.p0, sq.p1, sq.f, sq.g)))


def bcc_battery(
    T: Expr,
    ff_samples: Iterable[VFunctor] = (),
    cocomma_samples: Iterable[tuple[VFunctor, VFunctor]] = (),
    exact_squares: Iterable[LaxSquare] = (),
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> Report:
    """Falsification battery for the Beck-Chevalley condition.

    (a) ``Tj`` fully faithful for every fully faithful sample ``j``;
    (b) for ``f, g`` with a common source the comparison
    ``Tf |> Tg -> T(f |> g)`` is a V-functor that preserves every hom except
    those from the ``TB`` part back to the ``TA`` part (counted in
    ``info["reverse_mismatch"]``);
    (c) each exact square in ``exact_squares`` stays exact under ``T``.
    """
    rep = Report(f"bcc {T}")
    for j in ff_samples:
        rep.count()
        if ff_failure(j) is not None:
            rep.skip("ff_preservation", f"sample {j.label_map()} is not fully faithful")
            continue
        bad = ff_failure(apply_to_functor(T, j, max_objects))
        if bad is not None:
            rep.fail("ff_preservation", functor=j.label_map(), witness=[bad["a"], bad["b"]], **bad)
    for f, g in cocomma_samples:
        rep.count()
        outer = cocomma(f, g)
        inner = cocomma(apply_to_functor(T, f, max_objects), apply_to_functor(T, g, max_objects))
        ti0 = apply_to_functor(T, outer.i0, max_objects)
        ti1 = apply_to_functor(T, outer.i1, max_objects)
        can = VFunctor(inner.apex, ti0.dst, ti0.map + ti1.map)
        v = validate_functor(can)
        if not v.ok:
            detail = {k: val for k, val in v.first().items() if k != "check"}
            rep.fail("comparison_functor", f=f.label_map(), g=g.label_map(), **detail)
            continue
        bad, reverse = _comparison_failure(can, inner.i0.src.size)
        rep.info["reverse_mismatch"] = rep.info.get("reverse_mismatch", 0) + reverse
        if bad is not None:
            rep.fail("comparison_ff", f=f.label_map(), g=g.label_map(), witness=[bad["a"], bad["b"]], **bad)
    for sq in exact_squares:
        rep.count()
        if not is_exact(sq).exact:
            rep.skip("exact_image", "sample square is not exact")
            continue
        ex = is_exact(image_square(T, sq, max_objects))
        if not ex.exact:
            w = ex.witness
            rep.fail("exact_image", witness=[w["a"], w["b"]], **w)
    return rep


def _comparison_failure(can: VFunctor, split: int) -> tuple[dict | None, int]:
    """First hom of ``can`` that is not preserved, skipping the reverse block.

    Objects ``< split`` come from ``TA`` and the rest from ``TB``.  In the
    cocomma the hom from a ``TB`` object back to a ``TA`` object is bottom by
    construction, while ``T`` of the cocomma may be larger there; those
    entries are only counted.
    """
    q = can.quantale
    src = can.src.hom
    dst = can.dst.hom[np.ix_(can.idx, can.idx)]
    n = src.shape[0]
    reverse = 0
    for a in range(n):
        for b in range(n):
            if src[a, b] == dst[a, b]:
                continue
            if a >= split and b < split:
                reverse += 1
                continue
            return {
                "a": can.src.objects[a],
                "b": can.src.objects[b],
                "fa": can.dst.objects[can.map[a]],
                "fb": can.dst.objects[can.map[b]],
                "src_value": q.format(src[a, b]),
                "dst_value": q.format(dst[a, b]),
            }, reverse
    return None, reverse


def near_exact_image_failure(T: Expr, sq: LaxSquare, max_objects: int = DEFAULT_MAX_OBJECTS):
    """``None`` when the image square satisfies ``rhs <= lhs`` (always expected)."""
    from .squares import near_exact_failure

    return near_exact_failure(image_square(T, sq, max_objects))


# ---------------------------------------------------------------------------
# distributive laws


@dataclass(frozen=True)
class DistributiveLaw:
    T: Expr
    base: VCat
    component: VFunctor  # T(LA) -> L(TA)


def presheaf_mult(A: VCat, max_objects: int = DEFAULT_MAX_OBJECTS) -> VFunctor:
    """``LLA -> LA``, ``W |-> (a |-> join_w W(w) (x) w(a))``."""
    q = A.quantale
    LA = apply_to_category(Lower(), A, max_objects)
    LLA = apply_to_category(Lower(), LA, max_objects)
    images = mx.sup_tensor(q, LLA.tables, LA.tables)
    return VFunctor(LLA, LA, tuple(table_index(LA, r) for r in images))


def presheaf_yoneda(A: VCat, max_objects: int = DEFAULT_MAX_OBJECTS) -> VFunctor:
    return yoneda(A, apply_to_category(Lower(), A, max_objects))


def derive_distributive_law(T: Expr, A: VCat, max_objects: int = DEFAULT_MAX_OBJECTS) -> DistributiveLaw:
    """``delta_A(Phi) = (x |-> Tbar(yon^<>)(x, Phi))``."""
    if not A.quantale.finite:
        raise VLiftError("presheaf constructions require a finite quantale")
    y = presheaf_yoneda(A, max_objects)
    R = lift_via_collage(T, graph_upper(y), max_objects)  # T(LA) -|-> TA
    LTA = apply_to_category(Lower(), R.dst, max_objects)
    comp = []
    for k in range(R.src.size):
        try:
            comp.append(table_index(LTA, R.matrix[:, k]))
        except VLiftError:
            raise VLiftError(
                f"delta at {R.src.objects[k]!r} is not a presheaf on TA; T admits no lifting here"
            ) from None
    delta = VFunctor(R.src, LTA, tuple(comp))
    v = validate_functor(delta)
    if not v.ok:
        raise VLiftError(f"delta is not a V-functor: {v.first()}")
    return DistributiveLaw(T, A, delta)


def _map_witness(f: VFunctor, g: VFunctor, check: str) -> dict | None:
    for x, (i, j) in enumerate(zip(f.map, g.map)):
        if i != j:
            return {"check": check, "at": f.src.objects[x], "left": f.dst.objects[i], "right": g.dst.objects[j]}
    return None


def check_distributive_axioms(
    T: Expr,
    categories: Sequence[VCat],
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> Report:
    """Unit and multiplication diagrams as exact equalities of object maps.

    Unit:  ``delta_A . T(yon_A) = yon_TA``.
    Mult:  ``delta_A . T(mult_A) = mult_TA . L(delta_A) . delta_LA``.
    A category whose double-presheaf layer exceeds the cap is recorded as
    skipped rather than failed.
    """
    from .vcat import compose_functors as cf

    rep = Report(f"distributive law {T}")
    for A in categories:
        label = list(A.objects)
        try:
            dl = derive_distributive_law(T, A, max_objects)
        except SizeGuardError as e:
            rep.skip("unit", f"{label}: {e}")
            rep.skip("multiplication", f"{label}: {e}")
            continue
        except VLiftError as e:
            rep.fail("derive", category=label, error=str(e))
            continue
        delta = dl.component
        TA = apply_to_category(T, A, max_objects)
        rep.count()
        left = cf(delta, apply_to_functor(T, presheaf_yoneda(A, max_objects), max_objects))
        right = presheaf_yoneda(TA, max_objects)
        w = _map_witness(left, right, "unit")
        if w is not None:
            rep.fail(category=label, **w)
        try:
            LA = apply_to_category(Lower(), A, max_objects)
            dl_LA = derive_distributive_law(T, LA, max_objects).component
            left = cf(delta, apply_to_functor(T, presheaf_mult(A, max_objects), max_objects))
            right = cf(
                presheaf_mult(TA, max_objects),
                cf(apply_to_functor(Lower(), delta, max_objects), dl_LA),
            )
        except SizeGuardError as e:
            rep.skip("multiplication", f"{label}: {e}")
            continue
        rep.count()
        w = _map_witness(left, right, "multiplication")
        if w is not None:
            rep.fail(category=label, **w)
    return rep


__all__ = [
    "lift_via_collage",
    "lift_closed_form",
    "lift",
    "functoriality_battery",
    "bcc_battery",
    "image_square",
    "near_exact_image_failure",
    "DistributiveLaw",
    "derive_distributive_law",
    "check_distributive_axioms",
    "presheaf_mult",
    "presheaf_yoneda",
]
