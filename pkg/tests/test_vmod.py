import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_relations, bool_compose
from vlift.quantale import make_quantale
from vlift.report import ShapeError
from vlift.sampling import random_category, random_functor_into, random_module
from vlift.vcat import chain_category, discrete_category, validate_category
from vlift.vmod import (
    check_graph_adjunction,
    collage,
    compose,
    evaluation_module,
    graph_lower,
    graph_upper,
    identity_module,
    make_module,
    module_dagger,
    module_of_collage,
    validate_module,
    yoneda,
)

KINDS = ["two", "unit_lukasiewicz", "unit_product", "lawvere_plus", "unit_ultrametric"]
seeds = st.integers(0, 100_000)
kinds = st.sampled_from(KINDS)


def _rel_to_module(two, A, B, rel):
    return make_module(A, B, [[1 if (a, b) in rel else 0 for a in A.objects] for b in B.objects])


def _module_to_rel(R):
    return {(a, b) for a in R.src.objects for b in R.dst.objects if R(b, a) == 1}


def test_discrete_composition_is_relational_composition(two):
    A, B, C = discrete_category(two, "ab"), discrete_category(two, "xy"), discrete_category(two, "pq")
    for R in all_relations(A.objects, B.objects):
        for S in all_relations(B.objects, C.objects):
            got = compose(_rel_to_module(two, B, C, S), _rel_to_module(two, A, B, R))
            assert _module_to_rel(got) == bool_compose(R, S)


@given(seeds, kinds)
def test_composition_is_associative_and_unital(seed, kind):
    q = make_quantale(kind)
    rng = random.Random(seed)
    A, B, C, D = (random_category(q, rng.randint(1, 3), rng, prefix=p) for p in "abcd")
    R, S, T = random_module(A, B, rng), random_module(B, C, rng), random_module(C, D, rng)
    for M in (R, S, T):
        assert validate_module(M).ok
    assert compose(T, compose(S, R)) == compose(compose(T, S), R)
    assert compose(identity_module(B), R) == R == compose(R, identity_module(A))


@given(seeds, kinds)
def test_composition_is_monotone(seed, kind):
    q = make_quantale(kind)
    rng = random.Random(seed)
    A, B, C = (random_category(q, rng.randint(1, 3), rng, prefix=p) for p in "abc")
    R, S = random_module(A, B, rng), random_module(B, C, rng)
    R2 = random_module(A, B, rng)
    from vlift import matrix as mx

    Rj = make_module(A, B, mx.pointwise_join(q, R.matrix, R2.matrix))
    assert compose(S, R) <= compose(S, Rj)


def test_invalid_module_reports_action(two):
    A = chain_category(two, "ab")
    B = discrete_category(two, "x")
    R = make_module(A, B, [[1, 0]])
    rep = validate_module(R)
    assert not rep.ok and rep.failures[0]["check"] == "right_action"


def test_composition_needs_matching_middle(two):
    A, B = discrete_category(two, "a"), discrete_category(two, "b")
    with pytest.raises(ShapeError):
        compose(identity_module(A), identity_module(B))


@given(seeds, kinds)
def test_graph_modules_are_adjoint(seed, kind):
    q = make_quantale(kind)
    rng = random.Random(seed)
    B = random_category(q, rng.randint(1, 3), rng, prefix="b")
    f = random_functor_into(B, rng.randint(1, 3), rng)
    rep = check_graph_adjunction(f)
    assert rep.ok
    assert validate_module(graph_lower(f)).ok and validate_module(graph_upper(f)).ok


@given(seeds, kinds)
def test_collage_round_trip(seed, kind):
    q = make_quantale(kind)
    rng = random.Random(seed)
    A, B = random_category(q, rng.randint(0, 3), rng, prefix="a"), random_category(q, rng.randint(0, 3), rng, prefix="b")
    R = random_module(A, B, rng)
    c = collage(R)
    assert validate_category(c.coll).ok
    assert c.coll.objects == B.objects + A.objects
    assert module_of_collage(c) == R


def test_collage_cross_block_runs_from_target_to_source(godel3):
    A = discrete_category(godel3, "a")
    B = discrete_category(godel3, "b")
    c = collage(make_module(A, B, [[2]]))
    assert c.coll("b", "a") == 2 and c.coll("a", "b") == 0


def test_yoneda_is_fully_faithful_and_evaluation_recovers_it(godel3):
    rng = random.Random(4)
    for _ in range(10):
        A = random_category(godel3, rng.randint(1, 3), rng)
        y = yoneda(A)
        LA = y.dst
        assert np.array_equal(LA.hom[np.ix_(y.idx, y.idx)], A.hom)
        ev = evaluation_module(A, LA)
        assert validate_module(ev).ok
        # ev(a, y(a')) = A(a, a')
        assert np.array_equal(ev.matrix[:, y.idx], A.hom)


def test_dagger_extends_the_module(two):
    A = chain_category(two, "ab")
    B = discrete_category(two, "xy")
    R = make_module(A, B, [[1, 1], [0, 1]])
    d = module_dagger(R)
    y = yoneda(A, d.src)
    for a in range(A.size):
        img = d.dst.tables[d.map[y.map[a]]]
        assert list(img) == list(R.matrix[:, a])
