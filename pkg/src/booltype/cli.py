"""Command-line front end.

Every command builds a payload (an ordered dict of plain values) and prints
it either as indented text or as JSON.  Exit status: 0 success, 1 domain
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import guards
from .algebra import (
    Element,
    FiniteBooleanAlgebra,
    Homomorphism,
    MeasureAlgebra,
    all_homomorphisms,
    automorphisms,
    count_homomorphisms,
    eval_lattice,
    generated_subalgebra,
    is_antichain,
    is_independent,
    one_point_extension_interval,
    relative_algebra,
    sign_products,
    sikorski_extendable,
    subalgebra_isomorphisms,
)
from .boolean_types import (
    MODES,
    BooleanType,
    canonical_extension,
    chain_interval_images,
    check_image_bound,
    classify,
    codomain_conjugate,
    companion_types,
    conjugate,
    construct_surjective_type,
    count_extensions,
    decompose,
    encode_as_tuple_type,
    enumerate_types,
    evaluate_type,
    extensions,
    fingerprint,
    fingerprint_conjugate,
    full_conjugacy,
    is_realized,
    maximal_sum_and_blocking_atoms,
    maximize_image,
    merge_product_type,
    non_conjugate_extensions,
    realized_sum,
    recompose,
    restricted_image,
    smoothness_failure,
    split_product_type,
    support,
    support_by_formulas,
)
from .corpus import KINDS, generate_corpus
from .definable import (
    FormulaAlgebra,
    build_formula_algebra,
    closure_partition,
    dual_vc,
    orbit_partition,
    phi_restricted_algebra,
    primal_vc,
    split,
)
from .errors import BooltypeError
from .formula import default_variables, evaluate, free_variables, parse, to_text
from .literals import parse_algebra, parse_measure, parse_type, parse_weights, print_algebra, print_measure, print_type
from .local import TypeSpace, cb_rank, decompose_peeling, ladder_dimension, peeling_value, phi_type
from .measures import (
    KeislerMeasure,
    approximate_by_types,
    approximation_error,
    canonical_type_extensions,
    canonical_types_conjugate,
    decompose_measure,
    extend_with_value,
    extension_interval,
    from_boolean_type,
    measure_conjugacy,
    measure_from_weights,
    measure_of,
    measure_smoothness_failure,
    point_mass,
    smoothness_transfer,
    to_boolean_type,
    uniform_measure,
)
from .structure import FiniteStructure, load_structure


class UsageError(Exception):
    def __init__(self, message, prefix="usage-error"):
        super().__init__(message)
        self.prefix = prefix


class MissingFile(BooltypeError):
    prefix = "missing-file"


class Raw(str):
    """Output printed verbatim instead of as a report (structure files)."""


# --- argument helpers -------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except FileNotFoundError:
        raise MissingFile(f"no such file: {path}") from None


def _structure(args) -> FiniteStructure:
    if not args.structure:
        raise UsageError("--structure FILE is required")
    if not Path(args.structure).is_file():
        raise MissingFile(f"no such file: {args.structure}")
    return load_structure(args.structure)


def _params(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        body = body[1:-1]
    try:
        return tuple(sorted({int(t) for t in body.split(",") if t.strip()}))
    except ValueError:
        raise UsageError(f"bad parameter set {text!r}") from None


def _formula_algebra(args, s: FiniteStructure) -> FormulaAlgebra:
    return build_formula_algebra(s, args.vars, _params(args.params))


def _codomain(args) -> FiniteBooleanAlgebra:
    return parse_algebra(args.codomain or "1")


def _one_phi(args, required: bool = True) -> str | None:
    phis = args.phi or []
    if len(phis) > 1:
        raise UsageError("this command takes a single --phi")
    if not phis and required:
        raise UsageError("--phi FORMULA is required")
    return phis[0] if phis else None


def _type(args, s: FiniteStructure) -> BooleanType:
    if args.type:
        return parse_type(_read(args.type), s)
    if args.index is not None:
        types = enumerate_types(_formula_algebra(args, s), _codomain(args))
        if not 0 <= args.index < len(types):
            raise UsageError(f"--index must be below {len(types)}")
        return types[args.index]
    raise UsageError("give a type with --type FILE or --index N")


def _measure(args, s: FiniteStructure) -> KeislerMeasure:
    if args.measure:
        return parse_measure(_read(args.measure), s)
    fa = _formula_algebra(args, s)
    if args.weights:
        return measure_from_weights(fa, parse_weights(args.weights))
    if args.point is not None:
        return point_mass(fa, args.point)
    return uniform_measure(fa)


def _algebra_arg(text: str | None, what: str) -> FiniteBooleanAlgebra:
    if not text:
        raise UsageError(f"{what} is required")
    return parse_algebra(text)


def _elements(b: FiniteBooleanAlgebra, texts) -> list[Element]:
    return [b.parse_element(t) for t in texts]


# --- rendering -------------------------------------------------------------------

def _plain(v):
    if isinstance(v, Element):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, tuple) and all(isinstance(x, int) for x in v):
        return "(" + ",".join(map(str, v)) + ")"
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _emit(lines: list[str], key: str, value, indent: int) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        lines.append(f"{pad}{key}:")
        for k, v in value.items():
            _emit(lines, k, v, indent + 1)
    elif isinstance(value, list) and all(isinstance(x, (int, bool)) or x is None for x in value):
        lines.append(f"{pad}{key}: {_scalar(value)}")
    elif isinstance(value, list):
        lines.append(f"{pad}{key}: [{len(value)}]")
        for item in value:
            if isinstance(item, dict):
                lines.append(f"{pad}  -")
                for k, v in item.items():
                    _emit(lines, k, v, indent + 2)
            elif isinstance(item, str) and "\n" in item:
                lines.append(f"{pad}  - |")
                lines.extend(f"{pad}    {ln}" for ln in item.rstrip("\n").split("\n"))
            else:
                lines.append(f"{pad}  - {_scalar(item)}")
    elif isinstance(value, str) and "\n" in value:
        lines.append(f"{pad}{key}: |")
        lines.extend(f"{pad}  {ln}" for ln in value.rstrip("\n").split("\n"))
    else:
        lines.append(f"{pad}{key}: {_scalar(value)}")


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def render(command: str, payload: dict, as_json: bool, guard_notes: list[str]) -> str:
    payload = _plain(payload)
    if as_json:
        doc = {"command": command, "guards": guard_notes, "result": payload}
        return json.dumps(doc, indent=2) + "\n"
    lines = [f"command: {command}", f"guards: {', '.join(guard_notes) or 'default'}"]
    for k, v in payload.items():
        _emit(lines, k, v, 0)
    return "\n".join(lines) + "\n"


# --- commands ---------------------------------------------------------------------

def cmd_eval(args) -> dict:
    s = _structure(args)
    if not args.formula:
        raise UsageError("--formula is required")
    f = parse(args.formula, s)
    free = free_variables(f)
    k = args.vars
    if args.vars_given is False:
        k = 1 + max((int(v[1:]) for v in free if v[:1] == "x" and v[1:].isdigit()), default=-1)
        k = max(k, 0)
    truth = evaluate(f, s, k)
    out = {"formula": to_text(f), "variables": default_variables(k), "count": len(truth),
           "tuples": sorted(truth)}
    if args.params is not None and k:
        fa = build_formula_algebra(s, k, _params(args.params))
        out["atoms"] = list(fa.element(f).atoms)
    if args.type or args.index is not None:
        out["type_value"] = evaluate_type(_type(args, s), f)
    if args.measure or args.weights or args.point is not None:
        out["measure"] = measure_of(_measure(args, s), f)
    return out


def cmd_algebra_build(args) -> dict:
    s = _structure(args)
    fa = _formula_algebra(args, s)
    atoms = []
    for i in range(fa.atom_count):
        atoms.append({"index": i, "size": len(fa.orbits[i]), "representative": fa.representative(i),
                      "witness": to_text(fa.witness(i))})
    out = {"algebra": print_algebra(fa.algebra), "structure": s.name, "automorphisms": len(s.automorphisms.elements),
           "atoms": atoms}
    if args.oracle:
        out["closure_agrees"] = closure_partition(s, fa.k, fa.params) == orbit_partition(fa)
    return out


def cmd_algebra_op(args) -> dict:
    b = _algebra_arg(args.algebra, "--algebra")
    if not args.op:
        raise UsageError("--op is required")
    result = eval_lattice(args.op, *_elements(b, args.elements))
    return {"algebra": print_algebra(b), "op": args.op, "result": result}


def cmd_algebra_relative(args) -> dict:
    b = _algebra_arg(args.algebra, "--algebra")
    if len(args.elements) != 1:
        raise UsageError("relative takes exactly one element")
    rel, proj = relative_algebra(b.parse_element(args.elements[0]))
    return {"relative": print_algebra(rel),
            "projection": {repr(a): rel.to_parent(proj(a)) for a in b.atoms()}}


def cmd_algebra_generate(args) -> dict:
    b = _algebra_arg(args.algebra, "--algebra")
    sub = generated_subalgebra(_elements(b, args.elements), b)
    return {"blocks": [Element(b, m) for m in sub.blocks], "elements": len(list(sub.elements()))}


def cmd_algebra_check(args) -> dict:
    b = _algebra_arg(args.algebra, "--algebra")
    xs = _elements(b, args.elements)
    return {"antichain": is_antichain(xs), "independent": is_independent(xs),
            "sign_products": [{"signs": list(sig), "product": e} for sig, e in sign_products(xs)]}


def _partial_map(args, domain, codomain) -> dict:
    f = {}
    for item in args.map or []:
        if "->" not in item:
            raise UsageError(f"--map expects SRC->DST, got {item!r}")
        src, dst = item.split("->", 1)
        f[domain.parse_element(src)] = codomain.parse_element(dst)
    return f


def cmd_algebra_sikorski(args) -> dict:
    domain = _algebra_arg(args.algebra, "--algebra")
    codomain = _codomain(args)
    f = _partial_map(args, domain, codomain)
    res = sikorski_extendable(f, domain, codomain)
    out = {"extendable": res.extendable}
    if res.extendable:
        out["witness"] = list(res.witness.atom_images)
        if args.element:
            h = res.witness
            gens = generated_subalgebra(list(f), domain)
            h = Homomorphism(gens, codomain, tuple(h(Element(domain, blk)) for blk in gens.blocks))
            ext = one_point_extension_interval(h, domain.parse_element(args.element))
            out["interval"] = {"lo": ext.lo, "hi": ext.hi}
            if args.value:
                g = ext.extend_with(codomain.parse_element(args.value))
                out["extended"] = {repr(Element(domain, blk)): img for blk, img in zip(g.blocks, g.atom_images)}
    else:
        out["violation"] = [{"element": e, "sign": sign} for e, sign in res.violation]
    return out


def cmd_algebra_iso(args) -> dict:
    a1 = _algebra_arg(args.algebra, "--algebra")
    out = {}
    if args.other:
        a2 = parse_algebra(args.other)
        if args.weights:
            m1 = MeasureAlgebra(a1, tuple(parse_weights(args.weights)))
            m2 = MeasureAlgebra(a2, tuple(parse_weights(args.other_weights or args.weights)))
            isos = subalgebra_isomorphisms(m1, m2, measure_preserving=True)
        else:
            isos = subalgebra_isomorphisms(a1, a2)
    else:
        measure = MeasureAlgebra(a1, tuple(parse_weights(args.weights))) if args.weights else None
        isos = automorphisms(a1, measure)
    out["count"] = len(isos)
    out["maps"] = [list(h.atom_images) for h in isos]
    return out


def cmd_algebra_homs(args) -> dict:
    domain = _algebra_arg(args.algebra, "--algebra")
    codomain = _codomain(args)
    homs = list(all_homomorphisms(domain, codomain))
    assert len(homs) == count_homomorphisms(domain, codomain)
    return {"count": len(homs), "maps": [list(h.atom_images) for h in homs]}


def _type_row(p: BooleanType) -> str:
    return " ".join(repr(e) for e in p.atom_images)


def cmd_types_enumerate(args) -> dict:
    s = _structure(args)
    fa = _formula_algebra(args, s)
    types = enumerate_types(fa, _codomain(args))
    if args.literal:
        return {"count": len(types), "types": [print_type(p) for p in types]}
    return {"algebra": print_algebra(fa.algebra), "codomain": print_algebra(types[0].codomain) if types else None,
            "count": len(types), "types": [_type_row(p) for p in types]}


def cmd_types_classify(args) -> dict:
    s = _structure(args)
    fa = _formula_algebra(args, s)
    types = enumerate_types(fa, _codomain(args))
    mode = args.mode or "full"
    classes = classify(types, mode)
    out = {"mode": mode, "types": len(types), "classes": len(classes), "partition": classes}
    if mode == "full" and len(classes) > 0:
        witnesses = []
        for cls in classes:
            if len(cls) > 1:
                perm, sigma = full_conjugacy(types[cls[0]], types[cls[1]])
                witnesses.append({"pair": [cls[0], cls[1]], "permutation": perm, "sigma": list(sigma.atom_images)})
        out["witnesses"] = witnesses
    return out


def cmd_types_check(args) -> dict:
    s = _structure(args)
    p = _type(args, s)
    fp = fingerprint(p)
    report = maximal_sum_and_blocking_atoms(p)
    out = {
        "type": _type_row(p),
        "support": [c.atom for c in support(p)],
        "realized_sum": realized_sum(p),
        "realized": is_realized(p),
        "smoothness_failure": smoothness_failure(p),
        "maximal": report.is_maximal,
        "blocking_atoms": list(report.blocking),
        "fingerprint": {"image_blocks": list(fp.image_blocks), "enumeration": list(fp.enumeration),
                        "companion": list(fp.companion)},
    }
    if report.raised is not None:
        out["raised"] = {"params": report.raised[0], "sum": realized_sum(report.raised[1])}
    pair = non_conjugate_extensions(p)
    if pair is not None:
        out["non_conjugate_extensions"] = {"params": pair.params, "q1": _type_row(pair.q1), "q2": _type_row(pair.q2),
                                           "atom": pair.atom}
    for text in args.phi or []:
        phi = split(text, p.domain.k, s)
        bound = check_image_bound(p, phi)
        out.setdefault("image_bounds", []).append({
            "phi": to_text(phi.formula), "dual_vc": bound.dual_vc,
            "largest_independent": list(bound.largest_independent), "holds": bound.holds,
            "image_blocks": [Element(p.codomain, m) for m in restricted_image(p, phi).blocks]})
    if args.chain:
        out["chain_intervals"] = chain_interval_images(p, args.chain)
    if args.other:
        q = parse_type(_read(args.other), s, p.codomain)
        out["conjugacy"] = {mode: conjugate(p, q, mode) for mode in MODES}
        out["conjugacy"]["fingerprint"] = fingerprint_conjugate(p, q)
        out["conjugacy"]["codomain"] = codomain_conjugate(p, q)
    return out


def cmd_types_decompose(args) -> dict:
    s = _structure(args)
    p = _type(args, s)
    parts = decompose(p)
    by_formula = [c.atom for c in support_by_formulas(p)]
    ok = all(recompose(parts, e, p.codomain) == p(e) for e in p.domain.algebra.elements())
    out = {"entries": [{"value": b, "atom": c.atom, "witness": to_text(c.witness())} for b, c in parts],
           "support_by_formulas": by_formula, "reproduces": ok,
           "companions": [c.atom for c in companion_types(p)]}
    if args.product:
        comps = split_product_type(p)
        merged = merge_product_type(comps, p.codomain)
        out["product"] = {"components": [c.atom for c in comps], "merge_round_trip": merged == p}
        if p.codomain.atom_count > 1 and p.domain.k:
            tuple_type = encode_as_tuple_type(comps)
            out["product"]["tuple_atom"] = tuple_type.atom
            out["product"]["tuple_vars"] = tuple_type.domain.k
    return out


def cmd_types_maximize(args) -> dict:
    s = _structure(args)
    p = _type(args, s)
    templates = [split(t, p.domain.k, s) for t in args.phi] if args.phi else None
    res = maximize_image(p, templates)
    return {"params": res.params, "type": _type_row(res.type), "smooth": res.smooth,
            "steps": [{"template": t, "element": Element(p.codomain, m), "params": ps, "instance": a}
                      for t, m, ps, a in res.steps]}


def cmd_types_surjective(args) -> dict:
    s = _structure(args)
    phi = split(_one_phi(args), args.vars, s)
    codomain = _codomain(args)
    p = construct_surjective_type(s, phi, codomain, _params(args.params) or None)
    image = restricted_image(p, phi)
    return {"params": p.params, "type": _type_row(p), "image_elements": len(list(image.elements())),
            "codomain_elements": 2 ** codomain.atom_count}


def cmd_types_extend(args) -> dict:
    s = _structure(args)
    p = _type(args, s)
    if not args.superset:
        raise UsageError("--superset {..} is required")
    fine = build_formula_algebra(s, p.domain.k, _params(args.superset))
    canon = canonical_extension(p, fine)
    out = {"params": fine.params, "extensions": count_extensions(p, fine), "canonical": _type_row(canon)}
    if args.literal:
        out["all"] = [_type_row(q) for q in extensions(p, fine)]
    return out


def _measure_payload(lam: KeislerMeasure) -> dict:
    return {"measure": print_measure(lam)}


def cmd_measure_build(args) -> dict:
    return _measure_payload(_measure(args, _structure(args)))


def cmd_measure_decompose(args) -> dict:
    s = _structure(args)
    lam = _measure(args, s)
    pair = to_boolean_type(lam)
    back = from_boolean_type(pair.canonical_type, pair.quotient)
    return {"parts": [{"weight": w, "atom": c.atom} for w, c in decompose_measure(lam)],
            "quotient": print_algebra(pair.quotient.algebra),
            "quotient_weights": list(pair.quotient.atom_weights),
            "canonical_type": _type_row(pair.canonical_type),
            "round_trip": back == lam}


def cmd_measure_interval(args) -> dict:
    s = _structure(args)
    lam = _measure(args, s)
    phi = _one_phi(args)
    extra = _params(args.superset) if args.superset else None
    iv = extension_interval(lam, phi, extra)
    out = {"phi": phi, "params": iv.params, "lo": iv.lo, "hi": iv.hi}
    if args.value:
        out["extended"] = print_measure(extend_with_value(lam, phi, parse_weights(args.value)[0], extra))
    return out


def cmd_measure_smooth(args) -> dict:
    s = _structure(args)
    lam = _measure(args, s)
    rep = smoothness_transfer(lam)
    fail = measure_smoothness_failure(lam)
    out = {"measure_smooth": rep.measure_smooth, "type_smooth": rep.type_smooth, "vacuous": rep.vacuous,
           "pair_separated": rep.pair_separated, "agrees": rep.agrees,
           "failure": None if fail is None else {"params": fail[0], "split_atom": fail[1]}}
    full = build_formula_algebra(s, lam.domain.k, range(s.universe_size))
    out["canonical_extensions_at_full"] = canonical_type_extensions(lam, full)
    if args.other:
        other = parse_measure(_read(args.other), s)
        out["conjugacy"] = measure_conjugacy(lam, other)
        out["canonical_conjugacy"] = canonical_types_conjugate(lam, other)
    return out


def cmd_measure_approx(args) -> dict:
    s = _structure(args)
    lam = _measure(args, s)
    phi = split(_one_phi(args), lam.domain.k, s)
    ps = approximate_by_types(lam, phi, args.precision)
    err = approximation_error(lam, ps, phi)
    return {"precision": args.precision, "types": [c.atom for c in ps], "error": err,
            "within": err < Fraction(1, args.precision)}


def cmd_vc(args) -> dict:
    s = _structure(args)
    phi = split(_one_phi(args), args.vars, s)
    d, p = dual_vc(s, phi), primal_vc(s, phi)
    return {"phi": str(phi), "dual_vc": d.dimension, "dual_witness": list(d.witness),
            "vc": p.dimension, "vc_witness": list(p.witness)}


def cmd_ladder(args) -> dict:
    s = _structure(args)
    phi = split(_one_phi(args), args.vars, s)
    rep = ladder_dimension(s, phi)
    return {"phi": str(phi), "ladder": rep.max_ladder, "a": list(rep.a), "b": list(rep.b), "capped": rep.capped}


def cmd_peel(args) -> dict:
    s = _structure(args)
    p = _type(args, s)
    text = _one_phi(args, required=False)
    if text:
        local = phi_type(p, split(text, p.domain.k, s))
        ambient = phi_restricted_algebra(p.domain, split(text, p.domain.k, s))
    else:
        local = p
        ambient = None
    levels = decompose_peeling(local)
    domain = local.domain if text else None
    out = {"levels": [{"level": lvl.level, "unit": lvl.unit,
                       "entries": [{"value": c, "block": r} for c, r in lvl.entries]} for lvl in levels]}
    if domain is not None:
        out["reproduces"] = all(peeling_value(levels, e, domain, p.codomain) == local(e) for e in domain.elements())
        space = TypeSpace(ambient, frozenset(c.atom for c in support(p)))
        out["cb_rank"] = cb_rank(space)
    return out


def cmd_corpus(args) -> dict:
    blocks = [int(b) for b in args.blocks.split(",")] if args.blocks else None
    s = generate_corpus(args.kind, args.size or 0, args.seed, blocks)
    text = s.to_text()
    if args.output:
        Path(args.output).write_text(text)
        return {"structure": s.name, "written": args.output}
    return Raw(text) if not args.json else {"structure": text}


DISPATCH = {
    ("eval",): cmd_eval,
    ("algebra", "build"): cmd_algebra_build,
    ("algebra", "op"): cmd_algebra_op,
    ("algebra", "relative"): cmd_algebra_relative,
    ("algebra", "generate"): cmd_algebra_generate,
    ("algebra", "check"): cmd_algebra_check,
    ("algebra", "sikorski"): cmd_algebra_sikorski,
    ("algebra", "iso"): cmd_algebra_iso,
    ("algebra", "homs"): cmd_algebra_homs,
    ("types", "enumerate"): cmd_types_enumerate,
    ("types", "classify"): cmd_types_classify,
    ("classify",): cmd_types_classify,
    ("types", "check"): cmd_types_check,
    ("types", "decompose"): cmd_types_decompose,
    ("types", "maximize"): cmd_types_maximize,
    ("types", "surjective"): cmd_types_surjective,
    ("types", "extend"): cmd_types_extend,
    ("measure", "build"): cmd_measure_build,
    ("measure", "decompose"): cmd_measure_decompose,
    ("measure", "interval"): cmd_measure_interval,
    ("measure", "smooth"): cmd_measure_smooth,
    ("measure", "approx"): cmd_measure_approx,
    ("vc",): cmd_vc,
    ("ladder",): cmd_ladder,
    ("peel",): cmd_peel,
    ("corpus",): cmd_corpus,
}


# --- parser -------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "invalid choice" in message and ("COMMAND" in message or "ACTION" in message):
            raise UsageError(message, prefix="unknown-command")
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--structure", metavar="FILE")
    p.add_argument("--params", metavar="{i,...}")
    p.add_argument("--vars", type=int, default=None, metavar="k")
    p.add_argument("--codomain", metavar="SPEC", help="atom count or an algebra literal")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--guard", metavar="N", help="search cap, or name=value,...")
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true", help="print elapsed time on stderr")
    p.add_argument("--formula")
    p.add_argument("--phi", action="append", metavar="FORMULA")
    p.add_argument("--type", metavar="FILE")
    p.add_argument("--index", type=int)
    p.add_argument("--measure", metavar="FILE")
    p.add_argument("--weights")
    p.add_argument("--point", type=int)
    p.add_argument("--other", metavar="FILE|ALGEBRA")
    p.add_argument("--other-weights")
    p.add_argument("--algebra", metavar="ALGEBRA")
    p.add_argument("--op")
    p.add_argument("--map", action="append", metavar="SRC->DST")
    p.add_argument("--element")
    p.add_argument("--value")
    p.add_argument("--superset", metavar="{i,...}")
    p.add_argument("--precision", type=int, default=2)
    p.add_argument("--chain", metavar="SYMBOL")
    p.add_argument("--literal", action="store_true")
    p.add_argument("--product", action="store_true")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--types", choices=["all"], default="all", help="which types to classify")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="booltype", description="Boolean-algebra-valued types over finite structures.")
    top = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    groups: dict[str, argparse._SubParsersAction] = {}
    for path in DISPATCH:
        if len(path) == 1:
            sub = top.add_parser(path[0])
        else:
            if path[0] not in groups:
                grp = top.add_parser(path[0])
                groups[path[0]] = grp.add_subparsers(dest="action", metavar="ACTION", parser_class=_Parser)
            sub = groups[path[0]].add_parser(path[1])
        _common(sub)
        if path[0] == "algebra":
            sub.add_argument("elements", nargs="*")
        if path == ("corpus",):
            sub.add_argument("kind", choices=KINDS)
            sub.add_argument("size", type=int, nargs="?")
            sub.add_argument("--blocks", metavar="n,n,...")
            sub.add_argument("--output", metavar="FILE")
    return parser


def run(argv: list[str], out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("missing command")
        path = (args.command,) if (args.command,) in DISPATCH else (args.command, getattr(args, "action", None))
        if path not in DISPATCH:
            raise UsageError(f"unknown command: {' '.join(p for p in path if p)}")
        args.vars_given = args.vars is not None
        if args.vars is None:
            args.vars = 1
        overrides = {}
        if args.guard:
            try:
                overrides = guards.parse_overrides(args.guard)
            except ValueError as exc:
                raise UsageError(f"bad --guard: {exc}") from None
        notes = [f"{k}={v}" for k, v in sorted(overrides.items())]
        start = time.perf_counter()
        with guards.overridden(**overrides):
            payload = DISPATCH[path](args)
        text = payload if isinstance(payload, Raw) else render(" ".join(path), payload, args.json, notes)
        out.write(text)
        if args.timing:
            err.write(f"elapsed: {time.perf_counter() - start:.3f}s\n")
        return 0
    except UsageError as exc:
        err.write(f"{exc.prefix}: {exc}\n")
        return 2
    except BooltypeError as exc:
        err.write(f"{exc.prefix}: {exc}\n")
        return 1


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
