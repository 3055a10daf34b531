"""Finite relational structures, their text format, and automorphism groups."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from . import guards
from .errors import StructureFormatError


@dataclass(frozen=True)
class Relation:
    symbol: str
    arity: int
    tuples: frozenset[tuple[int, ...]]


@dataclass(eq=False)
class FiniteStructure:
    """A finite universe ``{0..m-1}`` with named relations (equality is built in)."""

    name: str
    universe_size: int
    relations: tuple[Relation, ...] = ()
    _tables: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.universe_size < 1:
            raise StructureFormatError("universe must be nonempty")
        self.relations = tuple(self.relations)
        seen = set()
        for rel in self.relations:
            if rel.symbol in seen:
                raise StructureFormatError(f"relation {rel.symbol} declared twice")
            if rel.symbol == "=":
                raise StructureFormatError("equality is built in and cannot be declared")
            seen.add(rel.symbol)
            if rel.arity < 1:
                raise StructureFormatError(f"relation {rel.symbol} needs positive arity")
            for t in rel.tuples:
                if len(t) != rel.arity:
                    raise StructureFormatError(f"tuple {t} has wrong arity for {rel.symbol}/{rel.arity}")
                if any(not 0 <= v < self.universe_size for v in t):
                    raise StructureFormatError(f"tuple {t} leaves the universe of {rel.symbol}")

    @classmethod
    def build(cls, name: str, m: int, relations: dict[str, Iterable[tuple[int, ...]]] | None = None,
              arities: dict[str, int] | None = None) -> FiniteStructure:
        rels = []
        for sym, tuples in (relations or {}).items():
            tuples = frozenset(tuple(t) for t in tuples)
            if arities and sym in arities:
                arity = arities[sym]
            elif tuples:
                arity = len(next(iter(tuples)))
            else:
                raise StructureFormatError(f"cannot infer the arity of empty relation {sym}")
            rels.append(Relation(sym, arity, tuples))
        return cls(name, m, tuple(rels))

    @property
    def universe(self) -> range:
        return range(self.universe_size)

    def relation(self, symbol: str) -> Relation:
        for rel in self.relations:
            if rel.symbol == symbol:
                return rel
        raise KeyError(symbol)

    def has_relation(self, symbol: str) -> bool:
        return any(rel.symbol == symbol for rel in self.relations)

    def table(self, symbol: str) -> np.ndarray:
        """Boolean array of shape ``(m,) * arity`` holding the relation."""
        if symbol not in self._tables:
            rel = self.relation(symbol)
            arr = np.zeros((self.universe_size,) * rel.arity, dtype=bool)
            for t in rel.tuples:
                arr[t] = True
            arr.setflags(write=False)
            self._tables[symbol] = arr
        return self._tables[symbol]

    def holds(self, symbol: str, t: tuple[int, ...]) -> bool:
        return tuple(t) in self.relation(symbol).tuples

    @cached_property
    def automorphisms(self) -> AutomorphismGroup:
        return automorphism_group(self)

    def to_text(self) -> str:
        lines = [f"structure {self.name}", f"universe {self.universe_size}"]
        for rel in self.relations:
            lines.append(f"relation {rel.symbol}/{rel.arity}")
        for rel in self.relations:
            body = " ".join("(" + ",".join(str(v) for v in t) + ")" for t in sorted(rel.tuples))
            lines.append(f"{rel.symbol}: {body}".rstrip())
        return "\n".join(lines) + "\n"


_TUPLE = re.compile(r"\(([^()]*)\)")


def parse_structure(text: str) -> FiniteStructure:
    """Parse the line-oriented structure format (``#`` starts a comment)."""
    name = None
    m = None
    arities: dict[str, int] = {}
    order: list[str] = []
    tuples: dict[str, set] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("structure "):
            name = line.split(None, 1)[1].strip()
        elif line.startswith("universe "):
            try:
                m = int(line.split(None, 1)[1])
            except ValueError:
                raise StructureFormatError(f"line {lineno}: bad universe size") from None
        elif line.startswith("relation "):
            spec = line.split(None, 1)[1].strip()
            match = re.fullmatch(r"(\S+)/(\d+)", spec)
            if not match:
                raise StructureFormatError(f"line {lineno}: expected relation <Sym>/<arity>")
            sym, arity = match.group(1), int(match.group(2))
            if sym in arities:
                raise StructureFormatError(f"line {lineno}: relation {sym} declared twice")
            arities[sym] = arity
            order.append(sym)
            tuples.setdefault(sym, set())
        elif ":" in line:
            sym, body = line.split(":", 1)
            sym = sym.strip()
            if sym not in arities:
                raise StructureFormatError(f"line {lineno}: undeclared relation {sym}")
            rest = _TUPLE.sub("", body).strip()
            if rest:
                raise StructureFormatError(f"line {lineno}: unexpected text {rest!r}")
            for group in _TUPLE.findall(body):
                items = [g.strip() for g in group.split(",") if g.strip()]
                try:
                    tuples[sym].add(tuple(int(v) for v in items))
                except ValueError:
                    raise StructureFormatError(f"line {lineno}: bad tuple ({group})") from None
        else:
            raise StructureFormatError(f"line {lineno}: cannot parse {line!r}")
    if name is None or m is None:
        raise StructureFormatError("missing 'structure' or 'universe' line")
    rels = tuple(Relation(sym, arities[sym], frozenset(tuples[sym])) for sym in order)
    return FiniteStructure(name, m, rels)


def load_structure(path) -> FiniteStructure:
    with open(path) as fh:
        return parse_structure(fh.read())


Permutation = tuple[int, ...]


@dataclass(eq=False)
class AutomorphismGroup:
    structure: FiniteStructure
    elements: tuple[Permutation, ...]
    _pointwise: dict = field(default_factory=dict, init=False, repr=False)
    _setwise: dict = field(default_factory=dict, init=False, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def generators(self) -> tuple[Permutation, ...]:
        """A generating subset, picked greedily in element order."""
        identity = tuple(range(self.structure.universe_size))
        gens: list[Permutation] = []
        reached = {identity}
        for g in self.elements:
            if g in reached:
                continue
            gens.append(g)
            reached = _closure(gens, identity)
            if len(reached) == len(self.elements):
                break
        return tuple(gens)

    def stabilizer(self, params: Iterable[int]) -> tuple[Permutation, ...]:
        """Automorphisms fixing every parameter."""
        key = frozenset(params)
        if key not in self._pointwise:
            self._pointwise[key] = tuple(g for g in self.elements if all(g[a] == a for a in key))
        return self._pointwise[key]

    def setwise_stabilizer(self, params: Iterable[int]) -> tuple[Permutation, ...]:
        """Automorphisms mapping the parameter set onto itself."""
        key = frozenset(params)
        if key not in self._setwise:
            self._setwise[key] = tuple(g for g in self.elements if all(g[a] in key for a in key))
        return self._setwise[key]


def _closure(gens, identity) -> set:
    reached = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[v] for v in p)
                if q not in reached:
                    reached.add(q)
                    nxt.append(q)
        frontier = nxt
    return reached


def compose(g: Permutation, h: Permutation) -> Permutation:
    """``g o h``."""
    return tuple(g[v] for v in h)


def inverse(g: Permutation) -> Permutation:
    out = [0] * len(g)
    for i, v in enumerate(g):
        out[v] = i
    return tuple(out)


def automorphism_group(s: FiniteStructure) -> AutomorphismGroup:
    """All permutations of the universe preserving every relation both ways.

    Backtracking assigns images to ``0, 1, ...`` in order and checks, after
    each assignment, the tuples whose largest entry was just assigned.
    """
    m = s.universe_size
    guards.check("automorphism", m, "universe size for automorphism enumeration")
    rels = [(rel.arity, rel.tuples) for rel in s.relations]
    # tuples over {0..i} whose maximum entry is i, per relation
    fresh: list[list[tuple[int, ...]]] = []
    for i in range(m):
        per = []
        for arity, _ in rels:
            per.append(_tuples_with_max(i, arity))
        fresh.append(per)

    found: list[Permutation] = []
    image = [0] * m
    used = [False] * m

    def ok(i: int) -> bool:
        for (arity, tuples), cand in zip(rels, fresh[i]):
            for t in cand:
                if (t in tuples) != (tuple(image[v] for v in t) in tuples):
                    return False
        return True

    def extend(i: int) -> None:
        if i == m:
            found.append(tuple(image))
            return
        for v in range(m):
            if used[v]:
                continue
            image[i] = v
            if ok(i):
                used[v] = True
                extend(i + 1)
                used[v] = False

    extend(0)
    found.sort()
    return AutomorphismGroup(s, tuple(found))


def _tuples_with_max(i: int, arity: int) -> list[tuple[int, ...]]:
    return [t for t in itertools.product(range(i + 1), repeat=arity) if max(t) == i]
