import json
from importlib import resources

import pytest

from vlift.coalg import Atom, Meet, Nabla, Value
from vlift.endo import Const, Lower, Sum, Tensor, TripleDiag
from vlift.workspace import (
    WorkspaceError,
    emit_workspace,
    parse_expr,
    parse_formula,
    parse_workspace,
    workspaces_equal,
)

CORPUS = sorted(p.name for p in resources.files("vlift").joinpath("corpus").iterdir() if p.name.endswith(".json"))


def _ws(**sections):
    return json.dumps({"quantale": sections.pop("quantale", "two"), **sections})


def _errors(text):
    with pytest.raises(WorkspaceError) as info:
        parse_workspace(text)
    return info.value.errors


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_round_trips(name):
    text = resources.files("vlift").joinpath("corpus", name).read_text()
    ws = parse_workspace(text)
    out = emit_workspace(ws)
    again = parse_workspace(out)
    assert workspaces_equal(ws, again)
    assert emit_workspace(again) == out


def test_category_sugar():
    ws = parse_workspace(_ws(categories={
        "D": {"discrete": ["a", "b"]},
        "I": {"indiscrete": ["a", "b"]},
        "C": {"chain": ["a", "b", "c"]},
        "P": {"preorder": {"objects": ["a", "b", "c"], "le": [["a", "b"], ["b", "c"]]}},
        "H": {"objects": ["a", "b"], "hom": [[1, 0], [1, 1]]},
    }))
    assert ws.categories["P"]("a", "c") == 1
    assert ws.categories["C"]("c", "a") == 0
    assert ws.categories["I"]("b", "a") == 1
    assert ws.categories["H"]("b", "a") == 1


def test_fraction_values_and_infinity():
    ws = parse_workspace(_ws(quantale="lawvere_plus", categories={
        "M": {"objects": ["x", "y"], "hom": [[0, "3/2"], ["inf", 0]]},
    }))
    assert str(ws.categories["M"]("y", "x")) == "inf"
    assert "3/2" in emit_workspace(ws)


def test_decimal_rejected_with_hint():
    errs = _errors(_ws(quantale="unit_lukasiewicz", categories={"M": {"objects": ["x"], "hom": [["0.5"]]}}))
    assert errs == ["categories.M.hom[0][0]: decimal value '0.5' rejected: use p/q"]


def test_inf_outside_lawvere_rejected():
    errs = _errors(_ws(quantale="unit_godel", categories={"M": {"objects": ["x"], "hom": [["inf"]]}}))
    assert "lawvere_plus" in errs[0]


def test_all_errors_are_collected():
    errs = _errors(_ws(
        categories={
            "bad": {"objects": ["a", "b", "c"], "hom": [[1, 1, 0], [0, 1, 1], [0, 0, 1]]},
            "ok": {"discrete": ["a"]},
        },
        functors={"f": {"src": "ok", "dst": "nowhere", "map": {"a": "a"}}},
        modules={"R": {"src": "ok", "dst": "ok", "matrix": [[1, 1]]}},
        extra={},
    ))
    joined = "\n".join(errs)
    assert "unknown section 'extra'" in joined
    assert "categories.bad: category axiom violated" in joined
    assert "functors.f.dst: unknown category 'nowhere'" in joined
    assert "modules.R.matrix: matrix must be 1x1" in joined


def test_parse_error_location():
    errs = _errors('{"quantale": "two",\n  "categories": {,}}')
    assert errs[0].startswith("parse error at line 2 column")


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[]", "top level"),
        ("{}", "quantale: missing"),
        ('{"quantale": "probabilistic"}', "out of scope"),
        ('{"quantale": {"kind": "godel_chain"}}', "integer n"),
    ],
)
def test_top_level_errors(text, fragment):
    assert fragment in _errors(text)[0]


def test_functor_errors():
    errs = _errors(_ws(
        categories={"A": {"chain": ["a", "b"]}, "B": {"discrete": ["x", "y"]}},
        functors={
            "f": {"src": "A", "dst": "B", "map": {"a": "x", "b": "y"}},
            "g": {"src": "A", "dst": "B", "map": {"a": "x"}},
            "h": {"src": "A", "dst": "B", "map": {"a": "x", "b": "zz"}},
        },
    ))
    joined = "\n".join(errs)
    assert "functors.f: not a V-functor" in joined
    assert "functors.g.map: no image for ['b']" in joined
    assert "functors.h.map: unknown objects ['zz']" in joined


def test_module_law_violation_reported():
    errs = _errors(_ws(
        categories={"A": {"chain": ["a", "b"]}, "B": {"discrete": ["x"]}},
        modules={"R": {"src": "A", "dst": "B", "matrix": [[1, 0]]}},
    ))
    assert errs[0].startswith("modules.R: module law violated")


def test_expression_grammar():
    ws = parse_workspace(_ws(categories={"X": {"discrete": ["p"]}}, endofunctors={"F": {"lower": "id"}}))
    assert parse_expr(ws, "F") == Lower()
    assert parse_expr(ws, "TD") == TripleDiag()
    T = parse_expr(ws, {"sum": [{"const": "X"}, {"tensor": ["id", "P"]}]})
    assert isinstance(T, Sum) and isinstance(T.left, Const) and isinstance(T.right, Tensor)
    with pytest.raises(WorkspaceError, match="unknown functor expression"):
        parse_expr(ws, "nope")
    with pytest.raises(WorkspaceError, match="two expressions"):
        parse_expr(ws, {"sum": ["id"]})


def test_formula_grammar():
    ws = parse_workspace(_ws(quantale={"kind": "godel_chain", "n": 2}, formulas={"base": {"meet": ["p", {"const": "1"}]}}))
    phi = parse_formula(ws, {"nabla": [{"formula": {"ref": "base"}, "weight": "2"}, {"formula": "q"}]})
    assert phi == Nabla(((Meet((Atom("p"), Value(1))), 2), (Atom("q"), 2)))
    with pytest.raises(WorkspaceError, match="unknown formula"):
        parse_formula(ws, {"ref": "missing"})
    with pytest.raises(WorkspaceError, match="weight"):
        parse_formula(ws, {"nabla": [{"formula": "p", "weight": "0.5"}]})


def test_coalgebra_and_model_sections():
    ws = parse_workspace(_ws(
        categories={"S": {"discrete": ["s0", "s1"]}},
        coalgebras={"c": {"space": "S", "functor": "P", "xi": {"s0": "P[0,1]", "s1": "P[0,0]"}}},
        models={"m": {"coalgebra": "c", "valuation": {"p": {"s1": 1}}}},
    ))
    assert ws.models["m"].valuation["p"] == (0, 1)
    errs = _errors(_ws(
        categories={"S": {"discrete": ["s0"]}},
        coalgebras={"c": {"space": "S", "functor": "P", "xi": {"s0": "P[9]"}}},
    ))
    assert errs[0].startswith("coalgebras.c:")


def test_square_functor_field_survives_round_trip():
    text = resources.files("vlift").joinpath("corpus", "paper_notbcc.json").read_text()
    ws = parse_workspace(text)
    assert set(ws.square_functors) == {"embedding"}
    again = parse_workspace(emit_workspace(ws))
    assert again.square_functors == ws.square_functors
