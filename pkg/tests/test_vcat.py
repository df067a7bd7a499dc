import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import is_preorder, subsets, ultrametric_prefix
from vlift.batteries import all_preorders
from vlift.quantale import make_quantale
from vlift.report import SizeGuardError, VLiftError
from vlift.sampling import random_category
from vlift.vcat import (
    Preorder,
    all_functors,
    chain_category,
    compose_functors,
    copresheaf_category,
    coproduct,
    discrete_category,
    ff_failure,
    free_on_preorder,
    identity_functor,
    indiscrete_category,
    is_fully_faithful,
    is_functor,
    make_category,
    make_functor,
    opposite,
    preorder_closure,
    presheaf_category,
    tensor_product,
    tensor_two,
    underlying_preorder,
    validate_category,
    validate_functor,
)

TWO = make_quantale("two")


def _relation(A):
    return {(a, b) for a in A.objects for b in A.objects if A.hom[A.index(a), A.index(b)] == 1}


def test_chain_and_discrete_are_categories(two):
    for A in (chain_category(two, "abc"), discrete_category(two, "xy"), indiscrete_category(two, "pq")):
        assert validate_category(A).ok


def test_validation_names_a_composition_witness(two):
    A = make_category(two, ["a", "b", "c"], [[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    rep = validate_category(A)
    assert not rep.ok
    assert rep.failures[0]["check"] == "composition"


def test_validation_names_an_identity_witness(two):
    A = make_category(two, ["a", "b"], [[0, 1], [0, 1]])
    rep = validate_category(A)
    assert not rep.ok
    assert any(f["check"] == "identity" for f in rep.failures)


def test_duplicate_labels_rejected(two):
    with pytest.raises(VLiftError, match="duplicate"):
        discrete_category(two, ["a", "a"])


@pytest.mark.parametrize("n,count", [(1, 1), (2, 4), (3, 29)])
def test_preorder_enumeration_counts(two, n, count):
    cats = all_preorders(two, n)
    assert len(cats) == count
    for A in cats:
        assert is_preorder(A.objects, _relation(A))


def test_preorder_round_trip(two):
    P = preorder_closure("abc", [("a", "b"), ("b", "c")])
    assert P.le("a", "c") and not P.le("c", "a")
    A = free_on_preorder(two, P)
    assert underlying_preorder(A) == P
    with pytest.raises(VLiftError):
        free_on_preorder(two, Preorder(("a", "b"), frozenset({("a", "b")})))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_functor_enumeration_matches_monotone_maps(two, n):
    for A in all_preorders(two, n):
        for B in all_preorders(two, 2):
            rel_a, rel_b = _relation(A), _relation(B)
            want = [m for m in itertools.product(range(B.size), repeat=A.size)
                    if all((B.objects[m[A.index(x)]], B.objects[m[A.index(y)]]) in rel_b for x, y in rel_a)]
            got = [f.map for f in all_functors(A, B)]
            assert got == want


def test_functor_enumeration_guard(two):
    A = discrete_category(two, range(5))
    with pytest.raises(SizeGuardError):
        list(all_functors(A, A, limit=100))


def test_functor_validation_and_faithfulness(two):
    A = discrete_category(two, "ab")
    B = chain_category(two, "ab")
    f = make_functor(A, B, {"a": "a", "b": "b"})
    assert validate_functor(f).ok
    assert not is_fully_faithful(f)
    wit = ff_failure(f)
    assert (wit["a"], wit["b"], wit["src_value"], wit["dst_value"]) == ("a", "b", "0", "1")
    back = make_functor(B, A, ["a", "b"])
    rep = validate_functor(back)
    assert not rep.ok and rep.failures[0]["a"] == "a"
    assert is_fully_faithful(identity_functor(B))


def test_make_functor_rejects_bad_maps(two):
    A = discrete_category(two, "ab")
    with pytest.raises(VLiftError, match="missing"):
        make_functor(A, A, {"a": "a"})
    with pytest.raises(VLiftError, match="unknown"):
        make_functor(A, A, {"a": "a", "b": "b", "z": "a"})


def test_composition_of_functors(two):
    A = chain_category(two, "abc")
    B = chain_category(two, "xy")
    f = make_functor(A, B, ["x", "x", "y"])
    g = make_functor(B, A, ["a", "c"])
    h = compose_functors(g, f)
    assert h.map == (0, 0, 2) and is_functor(h)


@given(st.integers(0, 10_000), st.sampled_from(["two", "unit_lukasiewicz", "lawvere_plus"]))
def test_constructions_preserve_categories(seed, kind):
    q = make_quantale(kind)
    rng = random.Random(seed)
    A = random_category(q, rng.randint(1, 3), rng)
    B = random_category(q, rng.randint(1, 3), rng)
    for C in (opposite(A), tensor_product(A, B), coproduct(A, B), tensor_two(A)):
        assert validate_category(C).ok


def test_tensor_product_labels_and_values(luk):
    F = Fraction
    A = make_category(luk, "ab", [[F(1), F(1, 2)], [F(1, 4), F(1)]])
    B = make_category(luk, "xy", [[F(1), F(3, 4)], [F(0), F(1)]])
    C = tensor_product(A, B)
    assert C.objects[:2] == ("(a,x)", "(a,y)")
    assert C("(a,x)", "(b,y)") == Fraction(1, 4)


def test_coproduct_prefixes_colliding_labels(two):
    C = coproduct(discrete_category(two, "ab"), discrete_category(two, "bc"))
    assert C.objects == ("a", "L.b", "R.b", "c")


def test_presheaves_on_a_preorder_are_down_sets(two):
    for A in all_preorders(two, 3):
        rel = _relation(A)
        downs = {S for S in subsets(A.objects) if all(x in S for (x, y) in rel if y in S)}
        LA = presheaf_category(A)
        got = {frozenset(a for a, v in zip(A.objects, row) if v) for row in LA.tables}
        assert got == downs
        assert validate_category(LA).ok
        # inclusion order of down-sets
        for i, j in itertools.product(range(LA.size), repeat=2):
            Si = {a for a, v in zip(A.objects, LA.tables[i]) if v}
            Sj = {a for a, v in zip(A.objects, LA.tables[j]) if v}
            assert bool(LA.hom[i, j]) == Si.issubset(Sj)


def test_copresheaves_are_up_sets_reversed(two):
    A = chain_category(two, "ab")
    UA = copresheaf_category(A)
    assert UA.objects == ("U[0,0]", "U[0,1]", "U[1,1]")
    assert validate_category(UA).ok
    # larger up-sets are smaller in the reversed order
    assert UA("U[1,1]", "U[0,0]") == 1 and UA("U[0,0]", "U[1,1]") == 0


def test_presheaves_need_a_finite_quantale(luk):
    with pytest.raises(VLiftError, match="finite"):
        presheaf_category(discrete_category(luk, "a"))


def test_presheaf_cap(two):
    with pytest.raises(SizeGuardError, match="cap"):
        presheaf_category(discrete_category(two, range(6)), max_objects=10)


def test_prefix_ultrametric_space_is_a_category():
    q = make_quantale("unit_ultrametric")
    words = ["", "a", "b", "aa", "ab"]
    A = make_category(q, words, [[ultrametric_prefix(v, w) for w in words] for v in words])
    assert validate_category(A).ok
    assert A("a", "b") == Fraction(1)
    assert A("aa", "ab") == Fraction(1, 2)
    assert not np.array_equal(A.hom, A.hom.T)
