"""Coalgebras, their morphisms, simulations, bisimilarity over supplied
witnesses and the many-valued cover modality.

A coalgebra is a V-functor ``xi: X -> TX``.  Formulas are evaluated to
tables over the states; the cover modality ``Nabla(gamma)`` is read off the
lifting of the satisfaction module along the dual functor::

    x |= Nabla gamma  =  Tbar_dual(|=)(xi(x), gamma)

with the formula stage taken as a discrete V-category.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from . import matrix as mx
from .endo import Dual, Expr, Id, Lower, Power, Upper, apply_to_category, apply_to_functor, up_closure
from .lifting import lift, lift_via_collage
from .quantale import Quantale
from .report import DEFAULT_MAX_OBJECTS, Report, VLiftError
from .vcat import (
    VCat,
    VFunctor,
    all_functors,
    discrete_category,
    opposite,
    table_index,
    validate_functor,
)
from .vmod import Module


# ---------------------------------------------------------------------------
# coalgebras


@dataclass(frozen=True, eq=False)
class Coalgebra:
    space: VCat
    functor: Expr
    xi: VFunctor  # space -> functor(space)
    name: str = ""

    @property
    def quantale(self) -> Quantale:
        return self.space.quantale

    @property
    def states(self) -> tuple:
        return self.space.objects

    def step(self, state: str) -> str:
        return self.xi(state)


def make_coalgebra(
    space: VCat,
    functor: Expr,
    xi: Mapping[str, str] | Sequence,
    name: str = "",
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> Coalgebra:
    """``xi`` maps each state to the label of an object of ``T(space)``."""
    TX = apply_to_category(functor, space, max_objects)
    if isinstance(xi, Mapping):
        missing = [s for s in space.objects if s not in xi]
        if missing:
            raise VLiftError(f"coalgebra {name or '?'}: no transition for states {missing}")
        m = tuple(TX.index(str(xi[s])) for s in space.objects)
    else:
        m = tuple(TX.index(t) if isinstance(t, str) else int(t) for t in xi)
    f = VFunctor(space, TX, m)
    rep = validate_functor(f)
    if not rep.ok:
        raise VLiftError(f"coalgebra {name or '?'}: structure map is not a V-functor: {rep.first()}")
    return Coalgebra(space, functor, f, name)


def is_morphism(c1: Coalgebra, c2: Coalgebra, f: VFunctor, max_objects: int = DEFAULT_MAX_OBJECTS) -> bool:
    """``xi2 . f = Tf . xi1``."""
    if c1.functor != c2.functor:
        raise VLiftError("coalgebras are for different functors")
    Tf = apply_to_functor(c1.functor, f, max_objects)
    return all(c2.xi.map[f.map[x]] == Tf.map[c1.xi.map[x]] for x in range(c1.space.size))


def find_coalgebra_morphisms(
    c1: Coalgebra,
    c2: Coalgebra,
    limit: int = 1 << 16,
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> list[VFunctor]:
    """All coalgebra morphisms ``c1 -> c2`` (object maps enumerated up to ``limit``)."""
    if c1.functor != c2.functor:
        raise VLiftError("coalgebras are for different functors")
    if c1.quantale != c2.quantale:
        raise VLiftError("coalgebras are over different quantales")
    return [f for f in all_functors(c1.space, c2.space, limit) if is_morphism(c1, c2, f, max_objects)]


def bisimilarity_closure(
    states: Mapping[str, Sequence[str]],
    witnesses: Iterable[tuple[str, str, VFunctor]],
) -> list[list[tuple[str, str]]]:
    """Equivalence on ``(coalgebra, state)`` pairs generated by ``x ~ f(x)``.

    ``states`` lists the states of every coalgebra by name; each witness is
    ``(source name, target name, morphism)``.  The result is relative to the
    supplied witnesses only.
    """
    G = nx.Graph()
    for c, ss in states.items():
        G.add_nodes_from((c, s) for s in ss)
    for src, dst, f in witnesses:
        if tuple(states.get(src, ())) != f.src.objects or tuple(states.get(dst, ())) != f.dst.objects:
            raise VLiftError(f"witness {src} -> {dst} does not match the coalgebra state spaces")
        for x, y in f.label_map().items():
            G.add_edge((src, x), (dst, y))
    return sorted(sorted(b) for b in nx.connected_components(G))


# ---------------------------------------------------------------------------
# formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Value(Formula):
    value: object

    def __str__(self):
        return f"#{self.value}"


@dataclass(frozen=True)
class Meet(Formula):
    args: tuple

    def __str__(self):
        return "(" + " & ".join(map(str, self.args)) + ")" if self.args else "top"


@dataclass(frozen=True)
class Join(Formula):
    args: tuple

    def __str__(self):
        return "(" + " | ".join(map(str, self.args)) + ")" if self.args else "bot"


@dataclass(frozen=True)
class Nabla(Formula):
    weights: tuple  # ((formula, value), ...)

    def __str__(self):
        return "Nabla{" + ", ".join(f"{f}:{w}" for f, w in self.weights) + "}"


def nabla_depth(phi: Formula) -> int:
    if isinstance(phi, Nabla):
        return 1 + max((nabla_depth(f) for f, _ in phi.weights), default=0)
    if isinstance(phi, (Meet, Join)):
        return max((nabla_depth(f) for f in phi.args), default=0)
    return 0


def atoms(phi: Formula) -> set:
    if isinstance(phi, Atom):
        return {phi.name}
    if isinstance(phi, Nabla):
        return set().union(*(atoms(f) for f, _ in phi.weights))
    if isinstance(phi, (Meet, Join)):
        return set().union(*(atoms(f) for f in phi.args))
    return set()


def box(phi: Formula, q: Quantale) -> Nabla:
    return Nabla(((phi, q.unit),))


# ---------------------------------------------------------------------------
# models and evaluation


@dataclass(eq=False)
class Model:
    coalgebra: Coalgebra
    valuation: dict  # atom name -> tuple of values indexed like the states
    name: str = ""
    max_objects: int = DEFAULT_MAX_OBJECTS
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def quantale(self) -> Quantale:
        return self.coalgebra.quantale


def predicate_failure(X: VCat, table) -> tuple | None:
    """First ``(x, x')`` with ``X(x,x') (x) phi x  <=  phi x'`` failing."""
    q = X.quantale
    for i in range(X.size):
        for j in range(X.size):
            if not q.le(q.tensor(X.hom[i, j], table[i]), table[j]):
                return (X.objects[i], X.objects[j])
    return None


def make_model(
    coalgebra: Coalgebra,
    valuation: Mapping[str, Mapping[str, object] | Sequence],
    closure: bool = False,
    name: str = "",
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> Model:
    """Atom predicates must be covariant on the state space; ``closure``
    replaces each by its up-closure first."""
    X = coalgebra.space
    q = X.quantale
    vals = {}
    for atom, tab in valuation.items():
        if isinstance(tab, Mapping):
            unknown = [s for s in tab if s not in X.objects]
            if unknown:
                raise VLiftError(f"atom {atom!r} values unknown states {unknown}")
            row = [tab.get(s, q.bottom) for s in X.objects]
        else:
            row = list(tab)
            if len(row) != X.size:
                raise VLiftError(f"atom {atom!r} has {len(row)} values for {X.size} states")
        q.check(*row)
        if closure:
            row = list(up_closure(X, row))
        bad = predicate_failure(X, row)
        if bad is not None:
            raise VLiftError(f"atom {atom!r} is not a V-functor on the states: fails at {bad} (try closure)")
        vals[atom] = tuple(row)
    return Model(coalgebra, vals, name, max_objects)


def _nabla_node(T: Expr) -> str:
    for tag, cls in (("L", Lower), ("U", Upper), ("P", Power)):
        if isinstance(T, cls) and isinstance(T.inner, Id):
            return tag
    raise VLiftError(f"the cover modality is supported for L, U and P coalgebras, not {T}")


def eval_table(model: Model, phi: Formula, method: str = "closed") -> tuple:
    """Truth values of ``phi`` at every state, in state order."""
    key = (phi, method)
    hit = model._cache.get(key)
    if hit is not None:
        return hit
    q = model.quantale
    n = model.coalgebra.space.size
    if isinstance(phi, Atom):
        if phi.name not in model.valuation:
            raise VLiftError(f"atom {phi.name!r} has no valuation")
        out = tuple(model.valuation[phi.name])
    elif isinstance(phi, Value):
        q.check(phi.value)
        out = (phi.value,) * n
    elif isinstance(phi, Meet):
        tabs = [eval_table(model, f, method) for f in phi.args]
        out = tuple(q.meet(t[i] for t in tabs) for i in range(n))
    elif isinstance(phi, Join):
        tabs = [eval_table(model, f, method) for f in phi.args]
        out = tuple(q.join(t[i] for t in tabs) for i in range(n))
    elif isinstance(phi, Nabla):
        out = _eval_nabla(model, phi, method)
    else:
        raise VLiftError(f"unknown formula {phi!r}")
    model._cache[key] = out
    return out


def evaluate(model: Model, phi: Formula, state: str, method: str = "closed"):
    return eval_table(model, phi, method)[model.coalgebra.space.index(state)]


def _gamma(model: Model, phi: Nabla):
    """Distinct subformulas and their weights (duplicates joined)."""
    q = model.quantale
    w: dict = {}
    for f, v in phi.weights:
        q.check(v)
        w[f] = q.join2(w[f], v) if f in w else v
    return list(w), list(w.values())


def _eval_nabla(model: Model, phi: Nabla, method: str) -> tuple:
    c = model.coalgebra
    q = model.quantale
    tag = _nabla_node(c.functor)
    if not q.finite:
        raise VLiftError("presheaf constructions require a finite quantale")
    subs, gamma = _gamma(model, phi)
    sat = np.zeros((c.space.size, len(subs)), dtype=np.int64)
    for k, f in enumerate(subs):
        sat[:, k] = eval_table(model, f, method)
    gamma = np.asarray(gamma, dtype=np.int64)
    TX = c.xi.dst
    succ = TX.tables[c.xi.idx]  # [x, y] = xi(x)(y)
    if method == "closed":
        return _nabla_closed(q, tag, sat, gamma, succ)
    if method == "collage":
        return _nabla_collage(model, subs, sat, gamma)
    raise VLiftError(f"unknown evaluation method {method!r}")


def _nabla_closed(q: Quantale, tag: str, sat: np.ndarray, gamma: np.ndarray, succ: np.ndarray) -> tuple:
    # sat[y, k] = y |= phi_k ; succ[x, y] = xi(x)(y)
    T, H = q.tensor_table, q.hom_table
    # U half: meet_y [xi x (y), join_k sat(y,k) (x) gamma(k)]
    cover = T[sat, gamma[None, :]].max(axis=1, initial=0)  # [y]
    u_half = H[succ, cover[None, :]].min(axis=1, initial=q.top)
    # L half: meet_k [gamma(k), join_y sat(y,k) (x) xi x (y)]
    reach = T[sat[None, :, :], succ[:, :, None]].max(axis=1, initial=0)  # [x, k]
    l_half = H[gamma[None, :], reach].min(axis=1, initial=q.top)
    if tag == "U":
        out = u_half
    elif tag == "L":
        out = l_half
    else:
        out = T[u_half, l_half]
    return tuple(int(v) for v in out)


def _nabla_collage(model: Model, subs, sat: np.ndarray, gamma: np.ndarray) -> tuple:
    c = model.coalgebra
    q = model.quantale
    stage = discrete_category(q, [f"phi{k}" for k in range(len(subs))])
    Xop = opposite(c.space)
    forces = Module(stage, Xop, mx.frozen(np.ascontiguousarray(sat)))
    D = Dual(c.functor)
    lifted = lift_via_collage(D, forces, model.max_objects)  # D(stage) -|-> D(Xop)
    if lifted.dst.objects != c.xi.dst.objects:  # pragma: no cover - guaranteed by construction
        raise AssertionError("dual image of the opposite state space is misaligned")
    g = table_index(lifted.src, gamma)
    return tuple(int(lifted.matrix[i, g]) for i in c.xi.map)


def check_invariance(
    m1: Model,
    m2: Model,
    morphism: VFunctor,
    formulas: Iterable[Formula],
    method: str = "closed",
) -> Report:
    """``eval(m1, phi, x) = eval(m2, phi, f x)`` for every state and formula."""
    rep = Report(f"invariance {m1.name or '?'} -> {m2.name or '?'}")
    if not is_morphism(m1.coalgebra, m2.coalgebra, morphism, m1.max_objects):
        raise VLiftError("witness is not a coalgebra morphism")
    for atom, tab in m1.valuation.items():
        other = m2.valuation.get(atom)
        if other is None or any(tab[x] != other[morphism.map[x]] for x in range(len(tab))):
            raise VLiftError(f"valuation of {atom!r} is not transported along the morphism")
    q = m1.quantale
    for phi in formulas:
        t1, t2 = eval_table(m1, phi, method), eval_table(m2, phi, method)
        for x, y in enumerate(morphism.map):
            rep.count()
            if t1[x] != t2[y]:
                rep.fail(
                    "invariance",
                    formula=str(phi),
                    state=m1.coalgebra.states[x],
                    image=m2.coalgebra.states[y],
                    left=q.format(t1[x]),
                    right=q.format(t2[y]),
                )
                break
    return rep


# ---------------------------------------------------------------------------
# simulation


@dataclass
class Simulation:
    relation: Module  # X -|-> Y, entries R(y, x)
    converged: bool
    iterations: int
    non_descending: list = field(default_factory=list)


def simulation_step(c1: Coalgebra, c2: Coalgebra, R: Module, max_objects: int = DEFAULT_MAX_OBJECTS) -> Module:
    """``Phi(R)(y, x) = Tbar(R)(nu y, xi x)``."""
    lifted = lift(c1.functor, R, max_objects)
    block = lifted.matrix[np.ix_(c2.xi.idx, c1.xi.idx)]
    return Module(c1.space, c2.space, mx.frozen(block.copy()))


def is_simulation(c1: Coalgebra, c2: Coalgebra, R: Module, max_objects: int = DEFAULT_MAX_OBJECTS) -> bool:
    return R <= simulation_step(c1, c2, R, max_objects)


def largest_simulation(
    c1: Coalgebra,
    c2: Coalgebra,
    max_iterations: int = 10_000,
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> Simulation:
    """Greatest fixpoint of ``Phi`` by descending iteration from the top matrix.

    Steps that fail to descend are recorded in ``non_descending``.
    """
    if c1.functor != c2.functor:
        raise VLiftError("coalgebras are for different functors")
    q = c1.quantale
    R = Module(c1.space, c2.space, mx.tops(q, (c2.space.size, c1.space.size)))
    bad = []
    for k in range(1, max_iterations + 1):
        nxt = simulation_step(c1, c2, R, max_objects)
        if nxt == R:
            return Simulation(R, True, k, bad)
        if not nxt <= R:
            bad.append(k)
        R = nxt
    return Simulation(R, False, max_iterations, bad)


__all__ = [
    "Coalgebra",
    "make_coalgebra",
    "is_morphism",
    "find_coalgebra_morphisms",
    "bisimilarity_closure",
    "Formula",
    "Atom",
    "Value",
    "Meet",
    "Join",
    "Nabla",
    "box",
    "nabla_depth",
    "atoms",
    "Model",
    "make_model",
    "eval_table",
    "evaluate",
    "check_invariance",
    "Simulation",
    "simulation_step",
    "is_simulation",
    "largest_simulation",
]
