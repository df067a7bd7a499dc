"""Workspace files: one quantale plus named categories, functors, modules,
endofunctor expressions, coalgebras, models, formulas and squares.

The format is JSON.  Values are written as strings ``"p/q"`` (``"inf"`` for
``lawvere_plus`` only) or as integers; decimals are rejected.  Sections are
resolved in dependency order and every schema problem is collected before
an error is raised.

Category sugar besides ``{"objects": [...], "hom": [[...]]}``::

    {"discrete": ["a", "b"]}
    {"indiscrete": ["a", "b"]}
    {"chain": ["a", "b", "c"]}
    {"preorder": {"objects": ["a", "b", "c"], "le": [["a", "c"], ["b", "c"]]}}

Endofunctor expressions: ``"id"``, ``"L"``, ``"U"``, ``"P"``, ``"components"``,
``"triple_diag"``, the name of another endofunctor, ``{"const": <category>}``,
``{"sum": [T, T]}``, ``{"tensor": [T, T]}``, ``{"dual": T}``, ``{"lower": T}``,
``{"upper": T}`` and ``{"power": T}``.

Formulas: ``{"atom": "p"}`` (or just ``"p"``), ``{"const": v}``,
``{"meet": [...]}``, ``{"join": [...]}``,
``{"nabla": [{"formula": F, "weight": v}, ...]}`` and ``{"ref": name}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from . import endo
from .coalg import Atom, Coalgebra, Formula, Join, Meet, Model, Nabla, Value, make_coalgebra, make_model
from .quantale import Quantale, QuantaleError, make_quantale
from .report import DEFAULT_MAX_OBJECTS, VLiftError
from .squares import LaxSquare
from .vcat import (
    VCat,
    VFunctor,
    chain_category,
    discrete_category,
    free_on_preorder,
    indiscrete_category,
    make_category,
    preorder_closure,
    validate_category,
    validate_functor,
)
from .vmod import Module, make_module, validate_module


class WorkspaceError(VLiftError):
    """Input problems; ``errors`` lists every one found."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


SECTIONS = (
    "quantale",
    "categories",
    "functors",
    "modules",
    "endofunctors",
    "coalgebras",
    "models",
    "formulas",
    "squares",
)


@dataclass
class Workspace:
    quantale: Quantale
    categories: dict = field(default_factory=dict)
    functors: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    endofunctors: dict = field(default_factory=dict)
    coalgebras: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    squares: dict = field(default_factory=dict)
    square_functors: dict = field(default_factory=dict)
    max_objects: int = DEFAULT_MAX_OBJECTS

    def category_name(self, A: VCat) -> str | None:
        for k, v in self.categories.items():
            if v == A:
                return k
        return None

    def lookup(self, section: str, name: str):
        table = getattr(self, section)
        if name not in table:
            raise WorkspaceError([f"{section}: no entry named {name!r}"])
        return table[name]


# ---------------------------------------------------------------------------
# parsing


class _Ctx:
    def __init__(self, q: Quantale | None, max_objects: int):
        self.q = q
        self.errors: list[str] = []
        self.max_objects = max_objects

    def err(self, where: str, msg: str):
        self.errors.append(f"{where}: {msg}")

    def value(self, where: str, v):
        try:
            return self.q.parse(v)
        except QuantaleError as e:
            self.err(where, str(e))
            return None

    def matrix(self, where: str, rows, shape):
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            self.err(where, "matrix must be a list of rows")
            return None
        if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
            self.err(where, f"matrix must be {shape[0]}x{shape[1]}")
            return None
        out = [[self.value(f"{where}[{i}][{j}]", v) for j, v in enumerate(r)] for i, r in enumerate(rows)]
        if any(v is None for r in out for v in r):
            return None
        return out


def load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise WorkspaceError([f"parse error at line {e.lineno} column {e.colno}: {e.msg}"]) from None


def parse_workspace(text: str, max_objects: int = DEFAULT_MAX_OBJECTS) -> Workspace:
    return workspace_from_data(load_json(text), max_objects)


def workspace_from_data(data: Any, max_objects: int = DEFAULT_MAX_OBJECTS) -> Workspace:
    if not isinstance(data, dict):
        raise WorkspaceError(["top level must be a JSON object"])
    unknown = [k for k in data if k not in SECTIONS]
    errors = [f"unknown section {k!r}" for k in unknown]
    if "quantale" not in data:
        errors.append("quantale: missing (one quantale per workspace)")
        raise WorkspaceError(errors)
    try:
        q = make_quantale(data["quantale"])
    except QuantaleError as e:
        raise WorkspaceError(errors + [f"quantale: {e}"]) from None
    ctx = _Ctx(q, max_objects)
    ctx.errors.extend(errors)
    ws = Workspace(q, max_objects=max_objects)
    for section in SECTIONS[1:]:
        body = data.get(section, {})
        if not isinstance(body, dict):
            ctx.err(section, "must be an object mapping names to definitions")
            continue
        parse = _PARSERS[section]
        for name, spec in body.items():
            where = f"{section}.{name}"
            try:
                obj = parse(ctx, ws, where, spec)
            except WorkspaceError as e:
                ctx.errors.extend(e.errors)
                obj = None
            except (VLiftError, QuantaleError) as e:
                ctx.err(where, str(e))
                obj = None
            if obj is not None:
                getattr(ws, section)[name] = obj
    if ctx.errors:
        raise WorkspaceError(ctx.errors)
    return ws


def _parse_category(ctx: _Ctx, ws: Workspace, where: str, spec) -> VCat | None:
    q = ctx.q
    if not isinstance(spec, dict):
        ctx.err(where, "category must be an object")
        return None
    if "discrete" in spec:
        return discrete_category(q, [str(o) for o in spec["discrete"]])
    if "indiscrete" in spec:
        return indiscrete_category(q, [str(o) for o in spec["indiscrete"]])
    if "chain" in spec:
        return chain_category(q, [str(o) for o in spec["chain"]])
    if "preorder" in spec:
        p = spec["preorder"]
        if not isinstance(p, dict) or "objects" not in p:
            ctx.err(where, "preorder needs 'objects' and 'le'")
            return None
        objs = [str(o) for o in p["objects"]]
        pairs = [tuple(map(str, e)) for e in p.get("le", [])]
        return free_on_preorder(q, preorder_closure(objs, pairs))
    if "objects" not in spec or "hom" not in spec:
        ctx.err(where, "category needs 'objects' and 'hom' (or discrete/indiscrete/chain/preorder sugar)")
        return None
    objs = [str(o) for o in spec["objects"]]
    rows = ctx.matrix(f"{where}.hom", spec["hom"], (len(objs), len(objs)))
    if rows is None:
        return None
    A = make_category(q, objs, rows)
    rep = validate_category(A)
    if not rep.ok:
        for f in rep.failures:
            ctx.err(where, f"category axiom violated: {f}")
        return None
    return A


def _ref(ctx: _Ctx, ws: Workspace, section: str, where: str, name):
    table = getattr(ws, section)
    if not isinstance(name, str) or name not in table:
        ctx.err(where, f"unknown {section[:-1] if section != 'categories' else 'category'} {name!r}")
        return None
    return table[name]


def _parse_functor(ctx: _Ctx, ws: Workspace, where: str, spec) -> VFunctor | None:
    if not isinstance(spec, dict) or not {"src", "dst", "map"} <= set(spec):
        ctx.err(where, "functor needs 'src', 'dst' and 'map'")
        return None
    A = _ref(ctx, ws, "categories", f"{where}.src", spec["src"])
    B = _ref(ctx, ws, "categories", f"{where}.dst", spec["dst"])
    if A is None or B is None:
        return None
    m = spec["map"]
    if not isinstance(m, dict):
        ctx.err(f"{where}.map", "object map must be an object {source: target}")
        return None
    bad = [k for k in m if k not in A.objects] + [v for v in m.values() if v not in B.objects]
    missing = [a for a in A.objects if a not in m]
    if bad or missing:
        if bad:
            ctx.err(f"{where}.map", f"unknown objects {bad}")
        if missing:
            ctx.err(f"{where}.map", f"no image for {missing}")
        return None
    f = VFunctor(A, B, tuple(B.index(m[a]) for a in A.objects))
    rep = validate_functor(f)
    if not rep.ok:
        for x in rep.failures:
            ctx.err(where, f"not a V-functor: {x}")
        return None
    return f


def _parse_module(ctx: _Ctx, ws: Workspace, where: str, spec) -> Module | None:
    if not isinstance(spec, dict) or not {"src", "dst", "matrix"} <= set(spec):
        ctx.err(where, "module needs 'src', 'dst' and 'matrix'")
        return None
    A = _ref(ctx, ws, "categories", f"{where}.src", spec["src"])
    B = _ref(ctx, ws, "categories", f"{where}.dst", spec["dst"])
    if A is None or B is None:
        return None
    rows = ctx.matrix(f"{where}.matrix", spec["matrix"], (B.size, A.size))
    if rows is None:
        return None
    R = make_module(A, B, rows)
    rep = validate_module(R)
    if not rep.ok:
        for x in rep.failures:
            ctx.err(where, f"module law violated: {x}")
        return None
    return R


_SIMPLE_EXPR = {
    "id": endo.Id(),
    "L": endo.Lower(),
    "U": endo.Upper(),
    "P": endo.Power(),
    "components": endo.ConnectedComponents(),
    "CC": endo.ConnectedComponents(),
    "triple_diag": endo.TripleDiag(),
    "TD": endo.TripleDiag(),
}
_UNARY = {"dual": endo.Dual, "lower": endo.Lower, "upper": endo.Upper, "power": endo.Power}
_BINARY = {"sum": endo.Sum, "tensor": endo.Tensor}


def parse_expr(ws: Workspace, spec, where: str = "functor") -> endo.Expr:
    """Parse an endofunctor expression; raises :class:`WorkspaceError`."""
    if isinstance(spec, str):
        if spec in _SIMPLE_EXPR:
            return _SIMPLE_EXPR[spec]
        if spec in ws.endofunctors:
            return ws.endofunctors[spec]
        raise WorkspaceError([f"{where}: unknown functor expression {spec!r}"])
    if isinstance(spec, dict) and len(spec) == 1:
        (tag, arg), = spec.items()
        if tag == "const":
            if not isinstance(arg, str) or arg not in ws.categories:
                raise WorkspaceError([f"{where}.const: unknown category {arg!r}"])
            return endo.Const(ws.categories[arg], arg)
        if tag in _UNARY:
            return _UNARY[tag](parse_expr(ws, arg, f"{where}.{tag}"))
        if tag in _BINARY:
            if not isinstance(arg, list) or len(arg) != 2:
                raise WorkspaceError([f"{where}.{tag}: needs a list of two expressions"])
            return _BINARY[tag](parse_expr(ws, arg[0], f"{where}.{tag}[0]"), parse_expr(ws, arg[1], f"{where}.{tag}[1]"))
    raise WorkspaceError([f"{where}: cannot parse functor expression {spec!r}"])


def _parse_endofunctor(ctx, ws, where, spec):
    return parse_expr(ws, spec, where)


def _parse_coalgebra(ctx: _Ctx, ws: Workspace, where: str, spec) -> Coalgebra | None:
    if not isinstance(spec, dict) or not {"space", "functor", "xi"} <= set(spec):
        ctx.err(where, "coalgebra needs 'space', 'functor' and 'xi'")
        return None
    X = _ref(ctx, ws, "categories", f"{where}.space", spec["space"])
    if X is None:
        return None
    T = parse_expr(ws, spec["functor"], f"{where}.functor")
    if not isinstance(spec["xi"], dict):
        ctx.err(f"{where}.xi", "must map states to object labels of T(space)")
        return None
    name = where.split(".", 1)[1]
    return make_coalgebra(X, T, {k: str(v) for k, v in spec["xi"].items()}, name, ctx.max_objects)


def parse_formula(ws: Workspace, spec, where: str = "formula", _stack: tuple = ()) -> Formula:
    """Parse a formula AST; ``ref`` nodes resolve against ``ws.formulas``."""
    q = ws.quantale
    if isinstance(spec, str):
        return Atom(spec)
    if not isinstance(spec, dict) or len(spec) != 1:
        raise WorkspaceError([f"{where}: cannot parse formula {spec!r}"])
    (tag, arg), = spec.items()
    if tag == "atom":
        return Atom(str(arg))
    if tag == "const":
        try:
            return Value(q.parse(arg))
        except QuantaleError as e:
            raise WorkspaceError([f"{where}.const: {e}"]) from None
    if tag in ("meet", "join"):
        if not isinstance(arg, list):
            raise WorkspaceError([f"{where}.{tag}: needs a list"])
        parts = tuple(parse_formula(ws, a, f"{where}.{tag}[{i}]", _stack) for i, a in enumerate(arg))
        return Meet(parts) if tag == "meet" else Join(parts)
    if tag == "nabla":
        if not isinstance(arg, list):
            raise WorkspaceError([f"{where}.nabla: needs a list of {{formula, weight}}"])
        ws_items = []
        errors = []
        for i, item in enumerate(arg):
            if not isinstance(item, dict) or "formula" not in item:
                errors.append(f"{where}.nabla[{i}]: needs 'formula' (and optional 'weight')")
                continue
            try:
                w = q.parse(item.get("weight", q.format(q.unit)))
            except QuantaleError as e:
                errors.append(f"{where}.nabla[{i}].weight: {e}")
                continue
            ws_items.append((parse_formula(ws, item["formula"], f"{where}.nabla[{i}]", _stack), w))
        if errors:
            raise WorkspaceError(errors)
        return Nabla(tuple(ws_items))
    if tag == "ref":
        if arg in _stack:
            raise WorkspaceError([f"{where}: cyclic formula reference {arg!r}"])
        if arg not in ws.formulas:
            raise WorkspaceError([f"{where}: unknown formula {arg!r}"])
        return ws.formulas[arg]
    raise WorkspaceError([f"{where}: unknown formula tag {tag!r}"])


def _parse_formula(ctx, ws, where, spec):
    return parse_formula(ws, spec, where)


def _parse_model(ctx: _Ctx, ws: Workspace, where: str, spec) -> Model | None:
    if not isinstance(spec, dict) or not {"coalgebra", "valuation"} <= set(spec):
        ctx.err(where, "model needs 'coalgebra' and 'valuation'")
        return None
    c = _ref(ctx, ws, "coalgebras", f"{where}.coalgebra", spec["coalgebra"])
    if c is None:
        return None
    val = spec["valuation"]
    if not isinstance(val, dict):
        ctx.err(f"{where}.valuation", "must map atoms to {state: value}")
        return None
    parsed = {}
    ok = True
    for atom, tab in val.items():
        if isinstance(tab, dict):
            row = {s: ctx.value(f"{where}.valuation.{atom}.{s}", v) for s, v in tab.items()}
            ok &= all(v is not None for v in row.values())
        elif isinstance(tab, list):
            row = [ctx.value(f"{where}.valuation.{atom}[{i}]", v) for i, v in enumerate(tab)]
            ok &= all(v is not None for v in row)
        else:
            ctx.err(f"{where}.valuation.{atom}", "must be {state: value} or a list")
            ok = False
            continue
        parsed[atom] = row
    if not ok:
        return None
    name = where.split(".", 1)[1]
    return make_model(c, parsed, bool(spec.get("closure", False)), name, ctx.max_objects)


def _parse_square(ctx: _Ctx, ws: Workspace, where: str, spec) -> LaxSquare | None:
    if not isinstance(spec, dict) or not {"p0", "p1", "f", "g"} <= set(spec):
        ctx.err(where, "square needs functors 'p0', 'p1', 'f' and 'g'")
        return None
    legs = [_ref(ctx, ws, "functors", f"{where}.{k}", spec[k]) for k in ("p0", "p1", "f", "g")]
    if any(x is None for x in legs):
        return None
    if "functor" in spec:
        ws.square_functors[where.split(".", 1)[1]] = parse_expr(ws, spec["functor"], f"{where}.functor")
    return LaxSquare(*legs)


_PARSERS = {
    "categories": _parse_category,
    "functors": _parse_functor,
    "modules": _parse_module,
    "endofunctors": _parse_endofunctor,
    "coalgebras": _parse_coalgebra,
    "models": _parse_model,
    "formulas": _parse_formula,
    "squares": _parse_square,
}


# ---------------------------------------------------------------------------
# emitting


def _fmt_rows(q: Quantale, m) -> list:
    return [[q.format(v) for v in row] for row in m]


def expr_to_data(T: endo.Expr):
    """Inverse of :func:`parse_expr` (named endofunctors come back inlined)."""
    if isinstance(T, endo.Id):
        return "id"
    if isinstance(T, endo.ConnectedComponents):
        return "components"
    if isinstance(T, endo.TripleDiag):
        return "triple_diag"
    if isinstance(T, endo.Const):
        return {"const": T.name}
    if isinstance(T, endo.Dual):
        return {"dual": expr_to_data(T.inner)}
    if isinstance(T, endo.Lower):
        return {"lower": expr_to_data(T.inner)}
    if isinstance(T, endo.Upper):
        return {"upper": expr_to_data(T.inner)}
    if isinstance(T, endo.Power):
        return {"power": expr_to_data(T.inner)}
    tag = "sum" if isinstance(T, endo.Sum) else "tensor"
    return {tag: [expr_to_data(T.left), expr_to_data(T.right)]}


def formula_to_data(q: Quantale, phi: Formula):
    if isinstance(phi, Atom):
        return {"atom": phi.name}
    if isinstance(phi, Value):
        return {"const": q.format(phi.value)}
    if isinstance(phi, Meet):
        return {"meet": [formula_to_data(q, f) for f in phi.args]}
    if isinstance(phi, Join):
        return {"join": [formula_to_data(q, f) for f in phi.args]}
    return {"nabla": [{"formula": formula_to_data(q, f), "weight": q.format(w)} for f, w in phi.weights]}


def workspace_to_data(ws: Workspace) -> dict:
    q = ws.quantale
    cname = {}
    for k, v in ws.categories.items():
        cname.setdefault(v, k)
    fname = {}
    for k, v in ws.functors.items():
        fname.setdefault(v, k)
    coname = {id(v): k for k, v in ws.coalgebras.items()}
    out: dict = {"quantale": q.descriptor()}
    out["categories"] = {
        k: {"objects": list(A.objects), "hom": _fmt_rows(q, A.hom)} for k, A in ws.categories.items()
    }
    out["functors"] = {
        k: {"src": cname[f.src], "dst": cname[f.dst], "map": f.label_map()} for k, f in ws.functors.items()
    }
    out["modules"] = {
        k: {"src": cname[R.src], "dst": cname[R.dst], "matrix": _fmt_rows(q, R.matrix)} for k, R in ws.modules.items()
    }
    out["endofunctors"] = {k: expr_to_data(T) for k, T in ws.endofunctors.items()}
    out["coalgebras"] = {
        k: {
            "space": cname[c.space],
            "functor": expr_to_data(c.functor),
            "xi": {s: c.xi.dst.objects[i] for s, i in zip(c.space.objects, c.xi.map)},
        }
        for k, c in ws.coalgebras.items()
    }
    out["models"] = {
        k: {
            "coalgebra": coname[id(m.coalgebra)],
            "valuation": {
                a: {s: q.format(v) for s, v in zip(m.coalgebra.states, tab)} for a, tab in m.valuation.items()
            },
        }
        for k, m in ws.models.items()
    }
    out["formulas"] = {k: formula_to_data(q, f) for k, f in ws.formulas.items()}
    out["squares"] = {}
    for k, s in ws.squares.items():
        entry = {"p0": fname[s.p0], "p1": fname[s.p1], "f": fname[s.f], "g": fname[s.g]}
        if k in ws.square_functors:
            entry["functor"] = expr_to_data(ws.square_functors[k])
        out["squares"][k] = entry
    return out


def emit_workspace(ws: Workspace) -> str:
    return json.dumps(workspace_to_data(ws), indent=2, sort_keys=False) + "\n"


def workspaces_equal(a: Workspace, b: Workspace) -> bool:
    """Structural equality via the canonical emitted form."""
    return workspace_to_data(a) == workspace_to_data(b)
