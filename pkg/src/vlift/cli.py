"""Command-line front end.

Usage: ``vlift COMMAND WORKSPACE [options]``.  WORKSPACE is a JSON file or
the name of a bundled corpus file (``paper_notbcc``, ``empty.json`` ...).

Every report is a human-readable block, a ``--- machine ---`` line and a
JSON object with sorted keys.  Exit codes: 0 pass, 1 counterexample found,
2 input error.  Identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .batteries import (
    random_composable_pair,
    random_cospan_sources,
    random_functor,
    run_chunks,
    structured_squares,
)
from .coalg import (
    bisimilarity_closure,
    check_invariance,
    eval_table,
    find_coalgebra_morphisms,
    largest_simulation,
)
from .endo import Id, Lower, Power, Upper, apply_to_functor
from .lifting import (
    bcc_battery,
    check_distributive_axioms,
    derive_distributive_law,
    functoriality_battery,
    image_square,
    lift,
    lift_closed_form,
    lift_via_collage,
)
from .quantale import QuantaleError
from .report import SizeGuardError, VLiftError
from .squares import LaxSquare, NotLaxError, cocomma, compose_collages, factorize, is_exact
from .vcat import ff_failure, is_fully_faithful, is_surjective_on_objects
from .vmod import collage, compose, module_of_collage
from .workspace import WorkspaceError, parse_expr, parse_workspace

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

COMMANDS = (
    "validate",
    "compose",
    "collage",
    "exact",
    "cocomma",
    "factorize",
    "lift",
    "battery",
    "bcc",
    "delta",
    "eval",
    "morphisms",
    "simulate",
    "bisim",
)


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers


class Out:
    """Collects the human block and the machine dict of one report."""

    def __init__(self, command: str):
        self.lines: list[str] = []
        self.data: dict = {"command": command}

    def say(self, *parts) -> None:
        self.lines.append(" ".join(str(p) for p in parts))

    def table(self, q, rows_labels, cols_labels, m, indent: str = "  ") -> None:
        cells = [[q.format(v) for v in row] for row in m]
        head = [""] + [str(c) for c in cols_labels]
        body = [[str(r)] + row for r, row in zip(rows_labels, cells)]
        widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
        for r in [head] + body:
            self.lines.append(indent + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())

    def render(self) -> str:
        return "\n".join(self.lines) + "\n--- machine ---\n" + json.dumps(self.data, sort_keys=True, indent=2) + "\n"


def _matrix_data(q, m) -> list:
    return [[q.format(v) for v in row] for row in m]


def _module_data(R) -> dict:
    q = R.quantale
    return {"src": list(R.src.objects), "dst": list(R.dst.objects), "matrix": _matrix_data(q, R.matrix)}


def _category_data(A) -> dict:
    return {"objects": list(A.objects), "hom": _matrix_data(A.quantale, A.hom)}


def _show_module(out: Out, title: str, R) -> None:
    out.say(f"{title}: {R.src.size} -|-> {R.dst.size} (rows = target, columns = source)")
    out.table(R.quantale, R.dst.objects, R.src.objects, R.matrix)


def _show_category(out: Out, title: str, A) -> None:
    out.say(f"{title}: {A.size} objects")
    out.table(A.quantale, A.objects, A.objects, A.hom)


def _verdict(out: Out, ok: bool) -> int:
    out.data["result"] = "pass" if ok else "fail"
    out.say("result:", "PASS" if ok else "FAIL")
    return EXIT_PASS if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# workspace access


def _resolve(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    corpus = resources.files("vlift") / "corpus"
    stem = p.name
    for suffix in (".json", ".ws"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    for cand in (f"{stem}.json", f"{stem}.ws.json"):
        f = corpus / cand
        if f.is_file():
            return f.read_text(encoding="utf-8")
    raise InputError(f"{path}: no such file or bundled corpus entry")


def _need(args, attr: str, flag: str, count: int | None = None):
    v = getattr(args, attr)
    if not v:
        raise InputError(f"{args.command} needs {flag}")
    if count is not None and len(v) != count:
        raise InputError(f"{args.command} needs {flag} exactly {count} time(s)")
    return v


def _get(ws, section: str, name: str):
    table = getattr(ws, section)
    if name not in table:
        raise InputError(f"{section}: no entry named {name!r}")
    return table[name]


def _functor_expr(ws, args):
    spec = _need(args, "functor", "--functor")
    try:
        spec = json.loads(spec)
    except json.JSONDecodeError:
        pass
    return parse_expr(ws, spec, "--functor")


def _bare_tag(T) -> str | None:
    for tag, cls in (("L", Lower), ("U", Upper), ("P", Power)):
        if isinstance(T, cls) and isinstance(T.inner, Id):
            return tag
    return None


# ---------------------------------------------------------------------------
# commands


def cmd_validate(ws, args, out: Out) -> int:
    counts = {
        s: len(getattr(ws, s))
        for s in ("categories", "functors", "modules", "endofunctors", "coalgebras", "models", "formulas", "squares")
    }
    out.say("quantale:", ws.quantale)
    for s, n in counts.items():
        out.say(f"{s}: {n}")
    out.data["quantale"] = ws.quantale.descriptor()
    out.data["counts"] = counts
    lax = {}
    for name, sq in sorted(ws.squares.items()):
        w = sq.lax_failure()
        lax[name] = w is None
        if w is not None:
            out.say(f"square {name} is not lax at {w}")
    out.data["squares_lax"] = lax
    return _verdict(out, all(lax.values()))


def cmd_compose(ws, args, out: Out) -> int:
    names = _need(args, "module", "--module")
    mods = [_get(ws, "modules", n) for n in names]
    for R, S, rn, sn in zip(mods, mods[1:], names, names[1:]):
        if R.dst != S.src:
            raise InputError(f"modules {rn} and {sn} are not composable ({rn} must end where {sn} starts)")
    total = mods[0]
    for S in mods[1:]:
        total = compose(S, total)
    out.say("composite of", " then ".join(names))
    _show_module(out, "result", total)
    out.data["composite"] = _module_data(total)
    ok = True
    if len(mods) == 2:
        route = args.route or "pushout"
        c = compose_collages(collage(mods[1]), collage(mods[0]), route)
        ok = c == collage(total)
        out.say(f"collage route {route} agrees:", "yes" if ok else "NO")
        out.data["route"] = route
        out.data["route_agrees"] = ok
    return _verdict(out, ok)


def cmd_collage(ws, args, out: Out) -> int:
    (name,) = _need(args, "module", "--module", 1)
    R = _get(ws, "modules", name)
    c = collage(R)
    _show_category(out, f"collage of {name} (target objects first)", c.coll)
    back = module_of_collage(c)
    ok = back == R
    out.say("module recovered from the collage:", "yes" if ok else "NO")
    out.data["collage"] = _category_data(c.coll)
    out.data["i0"] = c.i0.label_map()
    out.data["i1"] = c.i1.label_map()
    out.data["round_trip"] = ok
    return _verdict(out, ok)


def cmd_exact(ws, args, out: Out) -> int:
    names = args.square or sorted(ws.squares)
    if not names:
        raise InputError("workspace has no squares")
    override = _functor_expr(ws, args) if args.functor else None
    results = {}
    ok = True
    for name in names:
        sq = _get(ws, "squares", name)
        T = override if override is not None else ws.square_functors.get(name)
        entry: dict = {}
        try:
            base = is_exact(sq)
        except NotLaxError as e:
            raise InputError(f"square {name}: {e}") from None
        entry["exact"] = base.exact
        entry["witness"] = base.witness
        out.say(f"square {name}:", "exact" if base.exact else "NOT exact")
        if not base.exact:
            ok = False
            w = base.witness
            out.say(f"  witness ({w['a']}, {w['b']}): left side {w['lhs']}, right side {w['rhs']}")
        if T is not None:
            img = is_exact(image_square(T, sq, ws.max_objects))
            entry["functor"] = str(T)
            entry["image_exact"] = img.exact
            entry["image_witness"] = img.witness
            out.say(f"  image under {T}:", "exact" if img.exact else "NOT exact")
            if not img.exact:
                ok = False
                w = img.witness
                out.say(f"  witness ({w['a']}, {w['b']}): left side {w['lhs']}, right side {w['rhs']}")
            if sq.p0 == sq.p1 and sq.f == sq.g and base.exact:
                bad = ff_failure(apply_to_functor(T, sq.f, ws.max_objects))
                entry["image_ff"] = bad is None
                if bad is not None:
                    out.say(f"  {T} does not preserve full faithfulness: ({bad['a']}, {bad['b']})")
        results[name] = entry
    out.data["squares"] = results
    return _verdict(out, ok)


def cmd_cocomma(ws, args, out: Out) -> int:
    fn, gn = _need(args, "arrow", "--arrow", 2)
    f, g = _get(ws, "functors", fn), _get(ws, "functors", gn)
    if f.src != g.src:
        raise InputError(f"{fn} and {gn} need a common source")
    c = cocomma(f, g)
    _show_category(out, f"cocomma of {fn} and {gn}", c.apex)
    ex = is_exact(LaxSquare(f, g, c.i0, c.i1))
    out.say("cocomma square exact:", "yes" if ex.exact else "NO")
    out.data["apex"] = _category_data(c.apex)
    out.data["i0"] = c.i0.label_map()
    out.data["i1"] = c.i1.label_map()
    out.data["exact"] = ex.exact
    out.data["witness"] = ex.witness
    return _verdict(out, ex.exact)


def cmd_factorize(ws, args, out: Out) -> int:
    (fn,) = _need(args, "arrow", "--arrow", 1)
    f = _get(ws, "functors", fn)
    fac = factorize(f)
    _show_category(out, f"middle category of {fn}", fac.j.src)
    eso = is_surjective_on_objects(fac.e)
    ff = is_fully_faithful(fac.j)
    out.say("first part bijective on objects:", "yes" if eso else "NO")
    out.say("second part fully faithful:", "yes" if ff else "NO")
    out.data["middle"] = _category_data(fac.j.src)
    out.data["e"] = fac.e.label_map()
    out.data["j"] = fac.j.label_map()
    out.data["e_surjective"] = eso
    out.data["j_fully_faithful"] = ff
    return _verdict(out, eso and ff)


def cmd_lift(ws, args, out: Out) -> int:
    T = _functor_expr(ws, args)
    (name,) = _need(args, "module", "--module", 1)
    R = _get(ws, "modules", name)
    L = lift(T, R, ws.max_objects)
    _show_module(out, f"lifting of {name} along {T}", L)
    out.data["functor"] = str(T)
    out.data["lifted"] = _module_data(L)
    ok = True
    tag = _bare_tag(T)
    if tag is not None:
        other = lift_via_collage(T, R, ws.max_objects)
        ok = other == L == lift_closed_form(tag, R, ws.max_objects)
        out.say("closed form agrees with the collage route:", "yes" if ok else "NO")
        out.data["routes_agree"] = ok
    return _verdict(out, ok)


def _samples(ws, args):
    rng = random.Random(args.seed)
    q = ws.quantale
    size = args.max_size
    pairs = [random_composable_pair(q, rng, size) for _ in range(args.samples)]
    functors = [random_functor(q, rng, size) for _ in range(args.samples)]
    cospans = [random_cospan_sources(q, rng, size) for _ in range(args.samples)]
    return pairs, functors, cospans


def _workspace_samples(ws):
    mods = list(ws.modules.values())
    pairs = [(S, R) for R in mods for S in mods if R.dst == S.src]
    functors = list(ws.functors.values())
    cospans = [(f, g) for f in functors for g in functors if f.src == g.src]
    return pairs, functors, cospans


def _battery_job(job):
    T, cats, pairs, functors, max_objects = job
    return functoriality_battery(T, pairs, functors, max_objects, categories=cats)


def _bcc_job(job):
    T, ffs, cospans, squares, max_objects = job
    return bcc_battery(T, ffs, cospans, squares, max_objects)


def _chunks(items, k):
    """Contiguous, nonempty slices; concatenating them gives back ``items``."""
    n = len(items)
    k = max(1, min(k, n))
    return [items[n * i // k : n * (i + 1) // k] for i in range(k)] if n else []


def _family_jobs(families, jobs, build):
    """One job per chunk of each sample family, families kept in order so the
    merged report does not depend on ``jobs``."""
    work = []
    for slot, items in enumerate(families):
        for chunk in _chunks(items, jobs):
            parts = [[] for _ in families]
            parts[slot] = chunk
            work.append(build(*parts))
    return work


def _report_battery(out: Out, reports, title: str) -> bool:
    from .report import Report

    total = Report(title)
    for r in reports:
        total.merge(r)
        for k, v in r.info.items():
            total.info[k] = total.info.get(k, 0) + v
    out.say(f"{title}: {total.checked} checks, {len(total.failures)} failures, {len(total.skipped)} skipped")
    for f in total.failures[:5]:
        out.say("  failure:", json.dumps(f, sort_keys=True))
    d = total.to_dict()
    d["skipped"] = len(total.skipped)
    out.data["report"] = d
    return total.ok


def cmd_battery(ws, args, out: Out) -> int:
    T = _functor_expr(ws, args)
    wp, wf, _ = _workspace_samples(ws)
    rp, rf, _ = _samples(ws, args)
    pairs, functors = wp + rp, wf + rf
    cats = list(dict.fromkeys(A for S, R in pairs for A in (R.src, R.dst, S.dst)))
    jobs = max(1, args.jobs)
    work = _family_jobs([cats, pairs, functors], jobs, lambda c, p, f: (T, c, p, f, ws.max_objects))
    reports = run_chunks(_battery_job, work, jobs)
    out.data["functor"] = str(T)
    return _verdict(out, _report_battery(out, reports, f"functoriality of {T}"))


def cmd_bcc(ws, args, out: Out) -> int:
    T = _functor_expr(ws, args)
    _, wf, wc = _workspace_samples(ws)
    _, rf, rc = _samples(ws, args)
    ffs = [f for f in wf + rf if is_fully_faithful(f)]
    cospans = wc + rc
    squares = [sq for sq in ws.squares.values() if sq.is_lax()] + structured_squares(wf + rf)
    jobs = max(1, args.jobs)
    work = _family_jobs([ffs, cospans, squares], jobs, lambda a, b, c: (T, a, b, c, ws.max_objects))
    reports = run_chunks(_bcc_job, work, jobs)
    out.data["functor"] = str(T)
    return _verdict(out, _report_battery(out, reports, f"Beck-Chevalley battery for {T}"))


def cmd_delta(ws, args, out: Out) -> int:
    T = _functor_expr(ws, args)
    (cn,) = _need(args, "category", "--category", 1)
    A = _get(ws, "categories", cn)
    dl = derive_distributive_law(T, A, ws.max_objects)
    rows = dl.component.label_map()
    out.say(f"distributive law component for {T} at {cn}: {len(rows)} objects")
    for k, v in rows.items():
        out.say(f"  {k} -> {v}")
    rep = check_distributive_axioms(T, [A], ws.max_objects)
    out.data["functor"] = str(T)
    out.data["component"] = rows
    return _verdict(out, _report_battery(out, [rep], "axioms"))


def cmd_eval(ws, args, out: Out) -> int:
    (mn,) = _need(args, "model", "--model", 1)
    m = _get(ws, "models", mn)
    names = args.formula or sorted(ws.formulas)
    if not names:
        raise InputError("eval needs --formula or formulas in the workspace")
    q = ws.quantale
    c = m.coalgebra
    states = args.state or list(c.states)
    for s in states:
        if s not in c.states:
            raise InputError(f"model {mn} has no state {s!r}")
    tag = _bare_tag(c.functor)
    ok = True
    values = {}
    for fn in names:
        phi = _get(ws, "formulas", fn)
        tab = eval_table(m, phi, "closed")
        if tag is not None:
            agree = eval_table(m, phi, "collage") == tab
            ok &= agree
        row = {s: q.format(tab[c.space.index(s)]) for s in states}
        values[fn] = row
        out.say(f"{fn} = {phi}")
        out.say("  " + ", ".join(f"{s}: {v}" for s, v in row.items()))
    if tag is not None:
        out.say("closed form agrees with the collage route:", "yes" if ok else "NO")
        out.data["routes_agree"] = ok
    out.data["values"] = values
    return _verdict(out, ok)


def cmd_morphisms(ws, args, out: Out) -> int:
    (sn,) = _need(args, "source", "--source", 1)
    (tn,) = _need(args, "target", "--target", 1)
    c1, c2 = _get(ws, "coalgebras", sn), _get(ws, "coalgebras", tn)
    found = find_coalgebra_morphisms(c1, c2, max_objects=ws.max_objects)
    out.say(f"coalgebra morphisms {sn} -> {tn}: {len(found)}")
    maps = [f.label_map() for f in found]
    for mp in maps:
        out.say("  " + ", ".join(f"{k} -> {v}" for k, v in mp.items()))
    out.data["morphisms"] = maps
    out.data["result"] = "pass"
    out.say("result: PASS")
    return EXIT_PASS


def cmd_simulate(ws, args, out: Out) -> int:
    (sn,) = _need(args, "source", "--source", 1)
    (tn,) = _need(args, "target", "--target", 1)
    c1, c2 = _get(ws, "coalgebras", sn), _get(ws, "coalgebras", tn)
    sim = largest_simulation(c1, c2, max_objects=ws.max_objects)
    _show_module(out, f"largest simulation {sn} -> {tn}", sim.relation)
    out.say(f"converged after {sim.iterations} steps:", "yes" if sim.converged else "NO")
    if sim.non_descending:
        out.say("steps that did not descend:", sim.non_descending)
    out.data["relation"] = _module_data(sim.relation)
    out.data["converged"] = sim.converged
    out.data["iterations"] = sim.iterations
    out.data["non_descending"] = sim.non_descending
    return _verdict(out, sim.converged and not sim.non_descending)


def cmd_bisim(ws, args, out: Out) -> int:
    names = args.source or sorted(ws.coalgebras)
    coalgs = {n: _get(ws, "coalgebras", n) for n in names}
    witnesses = []
    for a in names:
        for b in names:
            ca, cb = coalgs[a], coalgs[b]
            if ca.functor != cb.functor or ca.quantale != cb.quantale:
                continue
            for f in find_coalgebra_morphisms(ca, cb, max_objects=ws.max_objects):
                witnesses.append((a, b, f))
    blocks = bisimilarity_closure({n: list(c.states) for n, c in coalgs.items()}, witnesses)
    out.say(f"{len(witnesses)} morphisms used as witnesses; {len(blocks)} classes")
    for b in blocks:
        out.say("  {" + ", ".join(f"{c}.{s}" for c, s in b) + "}")
    out.data["classes"] = [[f"{c}.{s}" for c, s in b] for b in blocks]
    ok = True
    formulas = [_get(ws, "formulas", n) for n in (args.formula or sorted(ws.formulas))]
    if formulas:
        checked = 0
        inv_fail = []
        models = sorted(ws.models.items())
        for a, b, f in witnesses:
            for mn1, m1 in models:
                for mn2, m2 in models:
                    if m1.coalgebra is not coalgs[a] or m2.coalgebra is not coalgs[b]:
                        continue
                    try:
                        rep = check_invariance(m1, m2, f, formulas)
                    except VLiftError:
                        continue
                    checked += rep.checked
                    inv_fail.extend(rep.failures)
        ok = not inv_fail
        out.say(f"invariance of {len(formulas)} formulas: {checked} checks, {len(inv_fail)} failures")
        out.data["invariance"] = {"checked": checked, "failures": inv_fail}
    return _verdict(out, ok)


_DISPATCH = {
    "validate": cmd_validate,
    "compose": cmd_compose,
    "collage": cmd_collage,
    "exact": cmd_exact,
    "cocomma": cmd_cocomma,
    "factorize": cmd_factorize,
    "lift": cmd_lift,
    "battery": cmd_battery,
    "bcc": cmd_bcc,
    "delta": cmd_delta,
    "eval": cmd_eval,
    "morphisms": cmd_morphisms,
    "simulate": cmd_simulate,
    "bisim": cmd_bisim,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vlift", description="Exact computation over quantale-enriched categories.")
    p.add_argument("--version", action="version", version=f"vlift {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("workspace", help="workspace JSON file or bundled corpus name")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for batteries")
    p.add_argument("--max-objects", type=int, default=None, help="cap on enumerated objects")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled batteries")
    p.add_argument("--samples", type=int, default=10, help="random samples per family in batteries")
    p.add_argument("--max-size", type=int, default=3, help="largest random category in batteries")
    p.add_argument("--route", choices=("pushout", "cocomma"), default=None)
    p.add_argument("--functor", help="endofunctor expression (name, shorthand or JSON)")
    p.add_argument("--module", action="append", help="module name (repeat to compose, first applied first)")
    p.add_argument("--arrow", action="append", help="functor name")
    p.add_argument("--square", action="append", help="square name (default: all)")
    p.add_argument("--category", action="append", help="category name")
    p.add_argument("--model", action="append", help="model name")
    p.add_argument("--formula", action="append", help="formula name (default: all)")
    p.add_argument("--state", action="append", help="state name (default: all)")
    p.add_argument("--source", action="append", help="coalgebra name")
    p.add_argument("--target", action="append", help="coalgebra name")
    return p


def run(argv: list[str]) -> tuple[int, str]:
    """Run one command; returns the exit code and the report text."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0), ""
    out = Out(args.command)
    try:
        text = _resolve(args.workspace)
        kw = {} if args.max_objects is None else {"max_objects": args.max_objects}
        ws = parse_workspace(text, **kw)
        code = _DISPATCH[args.command](ws, args, out)
    except WorkspaceError as e:
        return _input_error(out, e.errors)
    except (InputError, SizeGuardError, VLiftError, QuantaleError) as e:
        return _input_error(out, [str(e)])
    return code, out.render()


def _input_error(out: Out, errors: list[str]) -> tuple[int, str]:
    out.lines = ["input error:"] + [f"  {e}" for e in errors]
    out.data = {"command": out.data["command"], "result": "error", "errors": list(errors)}
    return EXIT_INPUT, out.render()


def main(argv: list[str] | None = None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
