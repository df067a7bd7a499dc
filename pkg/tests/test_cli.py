import json
import subprocess
import sys

import pytest

from oracles import forall_exists
from vlift.cli import run

MARK = "--- machine ---\n"


def machine(text):
    assert MARK in text
    return json.loads(text.split(MARK, 1)[1])


def call(*argv):
    code, text = run(list(argv))
    return code, text, machine(text) if text else None


def test_validate_empty_workspace():
    code, text, data = call("validate", "empty")
    assert code == 0
    assert data["command"] == "validate" and data["result"] == "pass"


@pytest.mark.parametrize("name", ["a_infinity.json", "a_infinity.ws", "a_infinity"])
def test_corpus_name_aliases(name):
    assert call("validate", name)[0] == 0


def test_missing_file_is_an_input_error():
    code, _, data = call("validate", "no_such_workspace")
    assert code == 2 and data["result"] == "error"


def test_decimal_in_file_is_an_input_error(tmp_path):
    p = tmp_path / "w.json"
    p.write_text(json.dumps({"quantale": "unit_godel", "categories": {"M": {"objects": ["x"], "hom": [["0.5"]]}}}))
    code, text, data = call("validate", str(p))
    assert code == 2
    assert "use p/q" in text
    assert data["errors"] == ["categories.M.hom[0][0]: decimal value '0.5' rejected: use p/q"]


def test_json_syntax_error_reports_location(tmp_path):
    p = tmp_path / "w.json"
    p.write_text('{"quantale": "two",\n "categories": [}')
    code, text, _ = call("validate", str(p))
    assert code == 2 and "line 2 column" in text


def test_missing_flag_is_an_input_error():
    code, text, _ = call("eval", "classical_two")
    assert code == 2 and "--model" in text


def test_unknown_command_exits_two():
    assert run(["frobnicate", "empty"])[0] == 2


def test_exact_reports_components_counterexample():
    code, text, data = call("exact", "paper_notbcc")
    assert code == 1
    assert "witness (comp_a, comp_b)" in text
    assert data["result"] == "fail"


def test_exact_reports_triple_diagonal_counterexample():
    code, text, _ = call("exact", "paper_triple_diag", "--square", "discrete")
    assert code == 1
    assert "((a,a,b), (a,b,a))" in text
    code, _, _ = call("exact", "paper_triple_diag", "--square", "all_I")
    assert code == 0


def test_lift_lower_matches_forall_exists_table():
    code, _, data = call("lift", "relations_two", "--module", "R", "--functor", "L")
    assert code == 0
    X, Y = ["x0", "x1", "x2"], ["y0", "y1"]
    rel = {("x0", "y0"), ("x2", "y0"), ("x1", "y1"), ("x2", "y1")}
    lifted = data["lifted"]

    def members(label, objs):
        bits = label[2:-1].split(",")
        return frozenset(o for o, b in zip(objs, bits) if b == "1")

    for i, ylab in enumerate(lifted["dst"]):
        for j, xlab in enumerate(lifted["src"]):
            want = forall_exists(rel, members(xlab, X), members(ylab, Y))
            assert lifted["matrix"][i][j] == ("1" if want else "0")


@pytest.mark.parametrize("route", ["pushout", "cocomma"])
def test_compose_routes_agree(route):
    code, text, _ = call("compose", "relations_two", "--module", "R", "--module", "S", "--route", route)
    assert code == 0
    assert f"collage route {route} agrees" in text


@pytest.mark.parametrize(
    "argv",
    [
        ("collage", "relations_two", "--module", "R"),
        ("cocomma", "relations_two", "--arrow", "g", "--arrow", "f"),
        ("factorize", "relations_two", "--arrow", "f"),
        ("battery", "relations_two", "--functor", "L", "--samples", "2"),
        ("bcc", "relations_two", "--functor", "L", "--samples", "2"),
        ("delta", "relations_two", "--functor", "id", "--category", "V"),
        ("eval", "classical_two", "--model", "Px_m"),
        ("morphisms", "classical_two", "--source", "Px", "--target", "Py"),
        ("simulate", "classical_two", "--source", "Ux", "--target", "Uy"),
        ("bisim", "classical_two"),
    ],
    ids=lambda a: a[0],
)
def test_commands_pass_on_corpus(argv):
    code, _, data = call(*argv)
    assert code == 0
    assert data["command"] == argv[0]


@pytest.mark.parametrize(
    "argv",
    [
        ("battery", "relations_two", "--functor", "CC"),
        ("bcc", "relations_two", "--functor", "CC", "--samples", "5"),
        ("delta", "relations_two", "--functor", "CC", "--category", "V"),
    ],
    ids=lambda a: a[0],
)
def test_commands_find_counterexamples(argv):
    assert call(*argv)[0] == 1


def test_functor_accepts_json_expressions():
    code, _, data = call("lift", "relations_two", "--module", "R", "--functor", '{"tensor": ["id", "id"]}')
    assert code == 0
    assert len(data["lifted"]["src"]) == 9


def test_output_is_deterministic():
    argv = ["bcc", "relations_two", "--functor", "P", "--samples", "4", "--seed", "3"]
    assert run(argv) == run(argv)


@pytest.mark.parametrize(
    "argv",
    [
        ["battery", "relations_two", "--functor", "U", "--samples", "6", "--seed", "1"],
        ["battery", "relations_two", "--functor", "CC", "--samples", "12"],
        ["bcc", "relations_two", "--functor", "CC", "--samples", "12"],
    ],
    ids=["passing", "failing", "bcc"],
)
def test_parallel_jobs_do_not_change_output(argv):
    assert run(argv) == run(argv + ["--jobs", "3"])


def test_machine_block_has_sorted_keys():
    _, text, data = call("validate", "relations_two")
    block = text.split(MARK, 1)[1]
    assert block.strip() == json.dumps(data, indent=2, sort_keys=True)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "vlift", "exact", "paper_notbcc"], capture_output=True, text=True)
    assert out.returncode == 1
    assert MARK in out.stdout
