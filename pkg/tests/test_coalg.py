import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import box, diamond, moss_nabla, similarity
from vlift.coalg import (
    Atom,
    Join,
    Meet,
    Nabla,
    Value,
    atoms,
    bisimilarity_closure,
    box as box_formula,
    check_invariance,
    eval_table,
    evaluate,
    find_coalgebra_morphisms,
    is_morphism,
    is_simulation,
    largest_simulation,
    make_coalgebra,
    make_model,
    nabla_depth,
)
from vlift.endo import Const, Id, Lower, Power, Tensor, Upper, apply_to_category
from vlift.quantale import make_quantale
from vlift.report import VLiftError
from vlift.vcat import all_functors, chain_category, discrete_category, indiscrete_category, make_functor

TWO = make_quantale("two")
NODES = {"U": Upper(), "L": Lower(), "P": Power()}
seeds = st.integers(0, 100_000)


def _label(tag, states, succ):
    return f"{tag}[{','.join('1' if s in succ else '0' for s in states)}]"


def _coalgebra(tag, succ, name="c"):
    states = list(succ)
    X = discrete_category(TWO, states)
    return make_coalgebra(X, NODES[tag], {s: _label(tag, states, succ[s]) for s in states}, name)


def _random_succ(rng, n, prefix="s"):
    states = [f"{prefix}{i}" for i in range(n)]
    return {s: frozenset(t for t in states if rng.random() < 0.4) for s in states}


def _sat_sets(model, formulas):
    states = model.coalgebra.states
    return {f: {s for s, v in zip(states, eval_table(model, f)) if v} for f in formulas}


@pytest.mark.parametrize("tag", ["U", "L", "P"])
@given(seed=seeds)
def test_cover_modality_matches_classical_semantics(tag, seed):
    rng = random.Random(seed)
    succ = _random_succ(rng, rng.randint(1, 4))
    c = _coalgebra(tag, succ)
    states = c.states
    m = make_model(c, {a: [rng.randint(0, 1) for _ in states] for a in ("p", "q")})
    base = [Atom("p"), Atom("q"), Meet((Atom("p"), Atom("q"))), Value(0)]
    sat = _sat_sets(m, base)
    for gamma in itertools.chain.from_iterable(itertools.combinations(base, r) for r in range(3)):
        phi = Nabla(tuple((f, 1) for f in gamma))
        got = {s for s, v in zip(states, eval_table(m, phi)) if v}
        for s in states:
            ys = succ[s]
            forth = all(any(y in sat[f] for f in gamma) for y in ys)
            back = all(any(y in sat[f] for y in ys) for f in gamma)
            want = {"U": forth, "L": back, "P": moss_nabla(ys, list(gamma), sat)}[tag]
            assert (s in got) == want


@pytest.mark.parametrize("tag", ["U", "L", "P"])
@pytest.mark.parametrize("spec", ["two", {"kind": "godel_chain", "n": 2}, {"kind": "lukasiewicz_chain", "n": 2}], ids=str)
def test_closed_and_collage_evaluation_agree(tag, spec):
    q = make_quantale(spec)
    rng = random.Random(7)
    for _ in range(8):
        n = rng.randint(1, 2)
        X = discrete_category(q, [f"s{i}" for i in range(n)])
        TX = apply_to_category(NODES[tag], X)
        c = make_coalgebra(X, NODES[tag], [rng.randrange(TX.size) for _ in range(n)])
        m = make_model(c, {"p": [rng.randint(0, q.n) for _ in range(n)]})
        inner = Nabla(((Atom("p"), rng.randint(0, q.n)), (Value(rng.randint(0, q.n)), q.n)))
        for phi in (inner, Nabla(((inner, q.n), (Atom("p"), rng.randint(0, q.n)))), Join((inner, Atom("p")))):
            assert eval_table(m, phi, "closed") == eval_table(m, phi, "collage")


def test_box_and_diamond():
    succ = {"a": frozenset({"b", "c"}), "b": frozenset(), "c": frozenset({"c"})}
    val = {"p": [0, 1, 1]}
    mu = make_model(_coalgebra("U", succ), val)
    ml = make_model(_coalgebra("L", succ), val)
    good = {"b", "c"}
    for s in succ:
        assert bool(evaluate(mu, box_formula(Atom("p"), TWO), s)) == box(succ[s], good)
        assert bool(evaluate(ml, box_formula(Atom("p"), TWO), s)) == diamond(succ[s], good)


def test_formula_helpers():
    phi = Meet((Atom("p"), Nabla(((Nabla(((Atom("q"), 1),)), 1),))))
    assert nabla_depth(phi) == 2
    assert atoms(phi) == {"p", "q"}
    assert str(Meet(())) == "top" and str(Join(())) == "bot"


def test_empty_nabla_holds_exactly_at_deadlocks():
    succ = {"a": frozenset({"a"}), "b": frozenset()}
    m = make_model(_coalgebra("P", succ), {})
    assert eval_table(m, Nabla(())) == (0, 1)


def test_predicates_must_be_covariant(two):
    X = chain_category(two, ["lo", "hi"])
    c = make_coalgebra(X, Upper(), {"lo": "U[1,1]", "hi": "U[0,1]"})
    with pytest.raises(VLiftError, match="closure"):
        make_model(c, {"p": [1, 0]})
    m = make_model(c, {"p": [1, 0]}, closure=True)
    assert m.valuation["p"] == (1, 1)


def test_model_input_errors(two):
    c = _coalgebra("P", {"a": frozenset()})
    with pytest.raises(VLiftError, match="unknown"):
        make_model(c, {"p": {"zz": 1}})
    with pytest.raises(VLiftError, match="values"):
        make_model(c, {"p": [1, 0]})
    m = make_model(c, {})
    with pytest.raises(VLiftError, match="no valuation"):
        eval_table(m, Atom("p"))
    with pytest.raises(VLiftError, match="method"):
        eval_table(m, Nabla(()), "guess")


def test_cover_modality_needs_presheaf_coalgebra(two):
    bits = Const(indiscrete_category(two, ["0", "1"]), "bits")
    X = discrete_category(two, ["s"])
    c = make_coalgebra(X, Tensor(bits, Id()), {"s": "(0,s)"})
    with pytest.raises(VLiftError, match="L, U and P"):
        eval_table(make_model(c, {}), Nabla(()))


def test_missing_transition(two):
    with pytest.raises(VLiftError, match="no transition"):
        make_coalgebra(discrete_category(two, "ab"), Power(), {"a": "P[0,0]"})


def _functional_bisims(s1, s2):
    a, b = list(s1), list(s2)
    for m in itertools.product(b, repeat=len(a)):
        f = dict(zip(a, m))
        if all({f[y] for y in s1[x]} == set(s2[f[x]]) for x in a):
            yield tuple(b.index(f[x]) for x in a)


@given(seeds)
def test_morphisms_are_functional_bisimulations(seed):
    rng = random.Random(seed)
    s1 = _random_succ(rng, rng.randint(1, 3), "x")
    s2 = _random_succ(rng, rng.randint(1, 3), "y")
    c1, c2 = _coalgebra("P", s1, "c1"), _coalgebra("P", s2, "c2")
    got = [f.map for f in find_coalgebra_morphisms(c1, c2)]
    assert got == list(_functional_bisims(s1, s2))


def test_morphism_checks_reject_mismatched_functors():
    c1 = _coalgebra("P", {"a": frozenset()})
    c2 = _coalgebra("U", {"a": frozenset()})
    with pytest.raises(VLiftError, match="different functors"):
        find_coalgebra_morphisms(c1, c2)


def test_invariance_along_morphisms():
    s1 = {"x0": frozenset({"x1"}), "x1": frozenset({"x0"}), "x2": frozenset({"x2"})}
    s2 = {"y0": frozenset({"y0"})}
    c1, c2 = _coalgebra("P", s1, "c1"), _coalgebra("P", s2, "c2")
    f = make_functor(c1.space, c2.space, ["y0"] * 3)
    assert is_morphism(c1, c2, f)
    m1 = make_model(c1, {"p": [1, 1, 1]}, name="m1")
    m2 = make_model(c2, {"p": [1]}, name="m2")
    phis = [Atom("p"), Nabla(((Atom("p"), 1),)), Nabla(((Nabla(((Atom("p"), 1),)), 1), (Value(0), 1)))]
    rep = check_invariance(m1, m2, f, phis)
    assert rep.ok and rep.checked == 9
    bad = make_model(c1, {"p": [1, 0, 1]})
    with pytest.raises(VLiftError, match="transported"):
        check_invariance(bad, m2, f, phis)


def test_bisimilarity_closure_classes():
    s = {"x0": frozenset({"x1"}), "x1": frozenset({"x0"})}
    t = {"y0": frozenset({"y0"})}
    c1, c2 = _coalgebra("P", s, "A"), _coalgebra("P", t, "B")
    ws = [("A", "B", f) for f in find_coalgebra_morphisms(c1, c2)]
    classes = bisimilarity_closure({"A": c1.states, "B": c2.states}, ws)
    assert classes == [[("A", "x0"), ("A", "x1"), ("B", "y0")]]
    assert len(bisimilarity_closure({"A": c1.states, "B": c2.states}, [])) == 3
    with pytest.raises(VLiftError, match="state spaces"):
        bisimilarity_closure({"A": c1.states, "B": ("zz",)}, ws)


@given(seeds)
def test_largest_simulation_matches_similarity(seed):
    rng = random.Random(seed)
    succ = _random_succ(rng, rng.randint(1, 4))
    c = _coalgebra("U", succ)
    sim = largest_simulation(c, c)
    assert sim.converged and not sim.non_descending
    R = sim.relation
    got = {(x, y) for x in c.states for y in c.states if R(y, x) == 1}
    assert got == similarity(succ)
    assert is_simulation(c, c, R)


def test_simulation_between_different_systems():
    s1 = {"a": frozenset({"a"})}
    s2 = {"b": frozenset(), "c": frozenset({"c"})}
    sim = largest_simulation(_coalgebra("U", s1), _coalgebra("U", s2))
    assert sim.relation("b", "a") == 0 and sim.relation("c", "a") == 1


def test_morphisms_over_a_preorder_space(two):
    X = chain_category(two, ["lo", "hi"])
    c = make_coalgebra(X, Upper(), {"lo": "U[1,1]", "hi": "U[0,1]"})
    ids = [f.map for f in find_coalgebra_morphisms(c, c)]
    assert (0, 1) in ids
    assert all(f.map in ids for f in all_functors(X, X) if is_morphism(c, c, f))
