"""Text literals for algebras, types and measures, with canonical printers.

Formats (``;`` may replace a line break)::

    algebra <name> atoms <n> [labels a,b,c]
    type over <structure> vars <k> params {i,j} codomain <algebra literal>
    atom <formula> -> {codomain atoms}
    measure over <structure> vars <k> params {i,j}
    atom <formula> -> p/q
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import FiniteBooleanAlgebra
from .boolean_types import BooleanType
from .definable import FormulaAlgebra, build_formula_algebra
from .errors import BooltypeError, StructureFormatError
from .formula import parse, to_text
from .measures import KeislerMeasure, as_fraction
from .structure import FiniteStructure

_ALGEBRA = re.compile(r"algebra\s+(\S+)\s+atoms\s+(\d+)(?:\s+labels\s+(\S+))?\s*")
_HEADER = re.compile(r"(type|measure)\s+over\s+(\S+)\s+vars\s+(\d+)\s+params\s+\{([^}]*)\}(?:\s+codomain\s+(.*))?")


def parse_algebra(text: str) -> FiniteBooleanAlgebra:
    """An algebra literal, or a bare integer meaning the powerset algebra on that many atoms."""
    text = text.strip()
    if text.isdigit():
        n = int(text)
        return FiniteBooleanAlgebra(n, name=f"2^{n}") if n else FiniteBooleanAlgebra(0)
    match = _ALGEBRA.fullmatch(text)
    if not match:
        raise StructureFormatError(f"expected 'algebra <name> atoms <n> [labels a,b,...]', got {text!r}")
    name, n, labels = match.group(1), int(match.group(2)), match.group(3)
    return FiniteBooleanAlgebra(n, labels=tuple(labels.split(",")) if labels else None, name=name)


def print_algebra(b: FiniteBooleanAlgebra) -> str:
    out = f"algebra {b.name or 'B'} atoms {b.atom_count}"
    if b.labels is not None:
        out += " labels " + ",".join(b.labels)
    return out


def _params_text(params) -> str:
    return "{" + ",".join(str(a) for a in params) + "}"


def _parse_params(text: str) -> tuple[int, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return tuple(sorted({int(t) for t in items}))
    except ValueError:
        raise StructureFormatError(f"bad parameter set {{{text}}}") from None


def _lines(text: str) -> list[str]:
    out = []
    for raw in re.split(r"[;\n]", text):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _header(text: str, kind: str, structure: FiniteStructure):
    lines = _lines(text)
    if not lines:
        raise StructureFormatError(f"empty {kind} literal")
    match = _HEADER.fullmatch(lines[0])
    if not match or match.group(1) != kind:
        raise StructureFormatError(f"expected a '{kind} over ...' header, got {lines[0]!r}")
    if match.group(2) != structure.name:
        raise StructureFormatError(f"literal is over {match.group(2)!r}, structure is {structure.name!r}")
    fa = build_formula_algebra(structure, int(match.group(3)), _parse_params(match.group(4)))
    return fa, match.group(5), lines[1:]


def _atom_lines(fa: FormulaAlgebra, lines: list[str]):
    seen = {}
    for line in lines:
        if not line.startswith("atom ") or "->" not in line:
            raise StructureFormatError(f"expected 'atom <formula> -> <value>', got {line!r}")
        formula, value = line[5:].rsplit("->", 1)
        e = fa.element(parse(formula.strip(), fa.structure))
        if len(e.atoms) != 1:
            raise StructureFormatError(f"formula {formula.strip()!r} does not define a single atom")
        a = e.atoms[0]
        if a in seen:
            raise StructureFormatError(f"atom of {formula.strip()!r} listed twice")
        seen[a] = value.strip()
    return seen


def parse_type(text: str, structure: FiniteStructure, codomain: FiniteBooleanAlgebra | None = None) -> BooleanType:
    """Atoms not listed get value 0.

    Passing ``codomain`` reuses an existing algebra (algebras compare by
    identity, so types meant to be compared must share one); the literal's
    codomain must then have the same shape.
    """
    fa, codomain_text, lines = _header(text, "type", structure)
    if codomain_text is None:
        raise StructureFormatError("type literal needs a codomain")
    declared = parse_algebra(codomain_text)
    if codomain is None:
        codomain = declared
    elif (declared.atom_count, declared.labels) != (codomain.atom_count, codomain.labels):
        raise StructureFormatError(f"codomain {print_algebra(declared)} does not match {print_algebra(codomain)}")
    values = _atom_lines(fa, lines)
    images = tuple(codomain.parse_element(values[a]) if a in values else codomain.zero
                   for a in range(fa.atom_count))
    return BooleanType(fa, codomain, images)


def print_type(p: BooleanType) -> str:
    fa = p.domain
    lines = [f"type over {fa.structure.name} vars {fa.k} params {_params_text(fa.params)} codomain {print_algebra(p.codomain)}"]
    for a, img in enumerate(p.atom_images):
        lines.append(f"atom {to_text(fa.witness(a))} -> {img!r}")
    return "\n".join(lines) + "\n"


def parse_measure(text: str, structure: FiniteStructure) -> KeislerMeasure:
    fa, extra, lines = _header(text, "measure", structure)
    if extra:
        raise StructureFormatError("measure literals take no codomain")
    values = _atom_lines(fa, lines)
    return KeislerMeasure(fa, tuple(as_fraction(values[a]) if a in values else Fraction(0)
                                    for a in range(fa.atom_count)))


def print_measure(lam: KeislerMeasure) -> str:
    fa = lam.domain
    lines = [f"measure over {fa.structure.name} vars {fa.k} params {_params_text(fa.params)}"]
    for a, w in enumerate(lam.weights):
        lines.append(f"atom {to_text(fa.witness(a))} -> {w.numerator}/{w.denominator}")
    return "\n".join(lines) + "\n"


def parse_weights(text: str) -> list[Fraction]:
    parts = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    if not parts:
        raise BooltypeError("no weights given")
    return [as_fraction(t) for t in parts]
