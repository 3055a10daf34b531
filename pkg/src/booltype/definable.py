"""Algebras of parameter-definable sets over a finite structure.

Over a finite structure a subset of ``M^k`` is definable with parameters
from ``A`` exactly when it is a union of orbits of the automorphisms fixing
``A`` pointwise, so the atoms of the formula algebra are those orbits.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import guards
from .algebra import Element, FiniteBooleanAlgebra, Subalgebra, generated_subalgebra
from .errors import BooltypeError, GuardExceeded, NotDefinable
from .formula import (
    Const, Eq, Formula, Not, Rel, Var, conj, default_variables, exists_many, free_variables,
    parse, to_text, truth_array,
)
from .structure import FiniteStructure

_CACHE: "weakref.WeakKeyDictionary[FiniteStructure, dict]" = weakref.WeakKeyDictionary()


def _encode(tuples: np.ndarray, m: int) -> np.ndarray:
    """Row-major index of each tuple (rows of ``tuples``) in ``M^k``."""
    k = tuples.shape[1]
    weights = m ** np.arange(k - 1, -1, -1)
    return tuples @ weights


def all_tuples(m: int, k: int) -> np.ndarray:
    """Every tuple of ``M^k`` in lexicographic order, one per row."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((m,) * k).reshape(k, -1).T
    return grid.astype(np.int64)


@dataclass(eq=False)
class FormulaAlgebra:
    """The algebra ``L_x(A)`` of ``A``-definable subsets of ``M^k``.

    Atom ``i`` is the orbit whose least tuple is the ``i``-th smallest among
    orbit representatives; ``labels`` maps each tuple (row-major index) to
    its atom.
    """

    structure: FiniteStructure
    k: int
    params: tuple[int, ...]
    labels: np.ndarray
    orbits: tuple[tuple[tuple[int, ...], ...], ...]

    def __repr__(self) -> str:
        return f"FormulaAlgebra({self.structure.name}, k={self.k}, params={self.params}, atoms={len(self.orbits)})"
    algebra: FiniteBooleanAlgebra = field(init=False)
    _witnesses: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        name = f"L{self.k}({{{','.join(map(str, self.params))}}})"
        self.algebra = FiniteBooleanAlgebra(len(self.orbits), name=name)

    @property
    def m(self) -> int:
        return self.structure.universe_size

    @property
    def atom_count(self) -> int:
        return len(self.orbits)

    def atom(self, i: int) -> Element:
        return self.algebra.atom(i)

    def atoms(self) -> list[Element]:
        return self.algebra.atoms()

    def representative(self, i: int) -> tuple[int, ...]:
        return self.orbits[i][0]

    def atom_of(self, t: Sequence[int]) -> int:
        t = tuple(t)
        if len(t) != self.k or any(not 0 <= v < self.m for v in t):
            raise BooltypeError(f"{t} is not a {self.k}-tuple over the universe")
        idx = 0
        for v in t:
            idx = idx * self.m + v
        return int(self.labels[idx])

    def tuples(self, e: Element) -> list[tuple[int, ...]]:
        if e.algebra is not self.algebra:
            raise BooltypeError("element belongs to another algebra")
        return sorted(t for i in e.atoms for t in self.orbits[i])

    def element_from_array(self, arr: np.ndarray) -> Element:
        """The element whose tuples are the true cells of ``arr`` (shape ``(m,)*k``)."""
        flat = np.asarray(arr, dtype=bool).reshape(-1)
        hit = np.zeros(self.atom_count, dtype=np.int64)
        np.add.at(hit, self.labels, flat.astype(np.int64))
        sizes = np.array([len(o) for o in self.orbits])
        partial = (hit > 0) & (hit < sizes)
        if partial.any():
            i = int(np.flatnonzero(partial)[0])
            raise NotDefinable(
                f"set is not definable over {{{','.join(map(str, self.params))}}}: it splits the orbit of {self.representative(i)}"
            )
        return self.algebra.element(int(i) for i in np.flatnonzero(hit))

    def element_from_tuples(self, tuples: Iterable[Sequence[int]]) -> Element:
        arr = np.zeros((self.m,) * self.k, dtype=bool)
        for t in tuples:
            arr[tuple(t)] = True
        return self.element_from_array(arr)

    def element(self, f: Formula | str) -> Element:
        """Element defined by ``f`` (free variables among ``x0..x(k-1)``)."""
        if isinstance(f, str):
            f = parse(f, self.structure)
        return self.element_from_array(truth_array(f, self.structure, default_variables(self.k)))

    def singleton_atoms(self) -> list[int]:
        """Atoms consisting of a single tuple (the ``x = a`` formulas up to equivalence)."""
        return [i for i, o in enumerate(self.orbits) if len(o) == 1]

    def witness(self, i: int) -> Formula:
        """A formula over the parameters defining exactly atom ``i``, verified by evaluation."""
        if i not in self._witnesses:
            self._witnesses[i] = _witness_formula(self, i)
        return self._witnesses[i]

    def describe_element(self, e: Element) -> str:
        return "{" + ", ".join(_tuple_text(t) for t in self.tuples(e)) + "}"


def _tuple_text(t: tuple[int, ...]) -> str:
    return str(t[0]) if len(t) == 1 else "(" + ",".join(map(str, t)) + ")"


def orbit_labels(structure: FiniteStructure, k: int, params: Iterable[int]) -> np.ndarray:
    """For each tuple of ``M^k`` the row-major index of the least tuple in its orbit."""
    m = structure.universe_size
    tuples = all_tuples(m, k)
    group = np.array(structure.automorphisms.stabilizer(params), dtype=np.int64)
    best = _encode(tuples, m)
    chunk = max(1, 4_000_000 // max(1, len(best) * max(k, 1)))
    for start in range(0, len(group), chunk):
        g = group[start:start + chunk]
        images = g[:, tuples]  # (|g|, N, k)
        codes = images @ (m ** np.arange(k - 1, -1, -1))
        best = np.minimum(best, codes.min(axis=0))
    return best


def build_formula_algebra(structure: FiniteStructure, k: int, params: Iterable[int] = ()) -> FormulaAlgebra:
    """``L_x(A)`` for ``|x| = k``; cached per structure so algebras are shared."""
    params = tuple(sorted(set(params)))
    m = structure.universe_size
    if k < 1:
        raise BooltypeError("variable tuples must have length at least 1")
    if any(not 0 <= a < m for a in params):
        raise BooltypeError(f"parameters must lie in the universe 0..{m - 1}")
    guards.check("tuples", m ** k, "formula algebra tuples m**k")
    cache = _CACHE.setdefault(structure, {})
    key = (k, params)
    if key not in cache:
        least = orbit_labels(structure, k, params)
        reps, labels = np.unique(least, return_inverse=True)
        tuples = all_tuples(m, k)
        members: list[list[tuple[int, ...]]] = [[] for _ in reps]
        for row, lab in zip(tuples.tolist(), labels.tolist()):
            members[lab].append(tuple(row))
        orbits = tuple(tuple(o) for o in members)
        cache[key] = FormulaAlgebra(structure, k, params, labels.astype(np.int64), orbits)
    return cache[key]


# --- witness formulas -------------------------------------------------------

def _diagram(structure: FiniteStructure, terms: list, values: list[int]) -> list[Formula]:
    """Atomic diagram of ``values`` named by ``terms``, skipping parameter-only literals."""
    lits: list[Formula] = []
    n = len(terms)
    for i in range(n):
        for j in range(i + 1, n):
            if isinstance(terms[i], Const) and isinstance(terms[j], Const):
                continue
            lit = Eq(terms[i], terms[j])
            lits.append(lit if values[i] == values[j] else Not(lit))
    for rel in structure.relations:
        for combo in itertools.product(range(n), repeat=rel.arity):
            if all(isinstance(terms[c], Const) for c in combo):
                continue
            lit = Rel(rel.symbol, tuple(terms[c] for c in combo))
            t = tuple(values[c] for c in combo)
            lits.append(lit if t in rel.tuples else Not(lit))
    return lits


def _witness_formula(fa: FormulaAlgebra, i: int) -> Formula:
    s = fa.structure
    rep = fa.representative(i)
    xs = [Var(v) for v in default_variables(fa.k)]
    consts = [Const(a) for a in fa.params]
    terms = xs + consts
    values = list(rep) + list(fa.params)
    target = np.zeros((fa.m,) * fa.k, dtype=bool)
    for t in fa.orbits[i]:
        target[t] = True
    # an empty diagram means the whole space
    candidate = conj(_diagram(s, terms, values) or [Eq(xs[0], xs[0])])
    if np.array_equal(truth_array(candidate, s, default_variables(fa.k)), target):
        return candidate
    # name every remaining element by a distinct bound variable
    rest = [v for v in range(fa.m) if v not in set(values)]
    zs = [f"z{j}" for j in range(len(rest))]
    terms = terms + [Var(z) for z in zs]
    values = values + rest
    candidate = exists_many(zs, conj(_diagram(s, terms, values) or [Eq(xs[0], xs[0])]))
    try:
        ok = np.array_equal(truth_array(candidate, s, default_variables(fa.k)), target)
    except GuardExceeded as exc:
        raise GuardExceeded(f"witness for atom {i} needs {len(zs)} bound variables: {exc}") from None
    if not ok:
        raise AssertionError(f"witness formula for atom {i} does not define its orbit")
    return candidate


# --- syntactic closure oracle -----------------------------------------------

def _qf_colours(structure: FiniteStructure, j: int, params: Sequence[int]) -> np.ndarray:
    """Quantifier-free type over the parameters of every ``j``-tuple, as colour ids."""
    m = structure.universe_size
    tuples = all_tuples(m, j)
    n = len(tuples)
    columns = [tuples[:, i] for i in range(j)] + [np.full(n, a, dtype=np.int64) for a in params]
    feats = []
    for a, b in itertools.combinations(range(len(columns)), 2):
        if a >= j and b >= j:
            continue
        feats.append(columns[a] == columns[b])
    for rel in structure.relations:
        table = structure.table(rel.symbol)
        for combo in itertools.product(range(len(columns)), repeat=rel.arity):
            if all(c >= j for c in combo):
                continue
            feats.append(table[tuple(columns[c] for c in combo)])
    if not feats:
        return np.zeros(n, dtype=np.int64)
    mat = np.stack(feats, axis=1)
    _, inv = np.unique(mat, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def closure_partition(structure: FiniteStructure, k: int, params: Iterable[int] = ()) -> list[frozenset]:
    """Partition of ``M^k`` into classes of formulas closed under connectives and ``E``.

    Colours start from quantifier-free types over the parameters and are
    refined by the set of colours of one-point extensions.  ``m`` rounds of
    refinement over tuple lengths ``k..k+m`` separate any two tuples that some
    formula separates.  Independent of the automorphism computation.
    """
    params = tuple(sorted(set(params)))
    m = structure.universe_size
    top = k + m
    guards.check("tensor", m ** top, "closure oracle tuples")
    colours = {j: _qf_colours(structure, j, params) for j in range(k, top + 1)}
    for _ in range(m):
        changed = False
        new = {top: colours[top]}
        for j in range(k, top):
            ext = colours[j + 1].reshape(-1, m)
            ext = np.sort(ext, axis=1)
            dup = np.zeros_like(ext, dtype=bool)
            dup[:, 1:] = ext[:, 1:] == ext[:, :-1]
            ext = np.where(dup, -1, ext)
            ext = np.sort(ext, axis=1)
            key = np.concatenate([colours[j][:, None], ext], axis=1)
            _, inv = np.unique(key, axis=0, return_inverse=True)
            inv = inv.reshape(-1)
            if len(np.unique(inv)) != len(np.unique(colours[j])):
                changed = True
            new[j] = inv
        colours = new
        if not changed:
            break
    tuples = all_tuples(m, k)
    classes: dict[int, list] = {}
    for row, c in zip(tuples.tolist(), colours[k].tolist()):
        classes.setdefault(c, []).append(tuple(row))
    return sorted((frozenset(v) for v in classes.values()), key=min)


def orbit_partition(fa: FormulaAlgebra) -> list[frozenset]:
    return [frozenset(o) for o in fa.orbits]


# --- phi-formulas -----------------------------------------------------------

@dataclass(frozen=True)
class SplitFormula:
    """A formula ``phi(x; y)`` with its object and parameter variables."""

    formula: Formula
    x: tuple[str, ...]
    y: tuple[str, ...]

    def __post_init__(self):
        if set(self.x) & set(self.y):
            raise BooltypeError("object and parameter variables overlap")
        extra = free_variables(self.formula) - set(self.x) - set(self.y)
        if extra:
            raise BooltypeError(f"free variable(s) outside the split: {', '.join(sorted(extra))}")

    def __str__(self) -> str:
        return f"{to_text(self.formula)} ; x = {','.join(self.x)} ; y = {','.join(self.y)}"

    def table(self, structure: FiniteStructure) -> np.ndarray:
        """Truth table with axes ``x`` then ``y``."""
        return truth_array(self.formula, structure, list(self.x) + list(self.y))


def split(phi: Formula | str, k: int = 1, structure: FiniteStructure | None = None,
          y: Sequence[str] | None = None) -> SplitFormula:
    """Split ``phi`` with object variables ``x0..x(k-1)``; the rest (sorted) are parameters."""
    if isinstance(phi, str):
        phi = parse(phi, structure)
    xs = tuple(default_variables(k))
    if y is None:
        y = tuple(sorted(free_variables(phi) - set(xs)))
    return SplitFormula(phi, xs, tuple(y))


def instance_elements(fa: FormulaAlgebra, phi: SplitFormula,
                      params: Iterable[int] | None = None) -> list[tuple[tuple[int, ...], Element]]:
    """``(a, phi(x, a))`` for every parameter tuple ``a`` over ``params`` (default: the algebra's)."""
    if len(phi.x) != fa.k:
        raise BooltypeError(f"formula has {len(phi.x)} object variables, algebra has {fa.k}")
    params = fa.params if params is None else tuple(sorted(set(params)))
    table = phi.table(fa.structure)
    out = []
    for a in itertools.product(params, repeat=len(phi.y)):
        out.append((a, fa.element_from_array(table[(Ellipsis,) + a] if a else table)))
    return out


def phi_restricted_algebra(fa: FormulaAlgebra, phi: SplitFormula) -> Subalgebra:
    """Subalgebra generated by the instances ``phi(x, a)`` with ``a`` over the parameters."""
    return generated_subalgebra([e for _, e in instance_elements(fa, phi)], fa.algebra)


# --- VC dimension -----------------------------------------------------------

def shattered_set(family: Sequence[int], points: int, limit: int | None = None) -> tuple[int, ...]:
    """A largest set of point indices shattered by ``family`` (bitmasks over points).

    Grows shattered sets level by level: a set is only shattered when all its
    subsets are, so candidates extend a shattered set by a larger point.
    """
    family = sorted(set(family))
    best: tuple[int, ...] = ()
    level = [()]
    while level:
        if limit is not None and len(best) >= limit:
            break
        nxt = []
        for s in level:
            start = s[-1] + 1 if s else 0
            for p in range(start, points):
                cand = s + (p,)
                if _shatters(family, cand):
                    nxt.append(cand)
        if nxt:
            best = nxt[0]
        level = nxt
    return best


def _shatters(family: Sequence[int], pts: tuple[int, ...]) -> bool:
    need = 1 << len(pts)
    seen = set()
    for f in family:
        seen.add(tuple(f >> p & 1 for p in pts))
        if len(seen) == need:
            return True
    return False


def _families(structure: FiniteStructure, phi: SplitFormula, dual: bool):
    m = structure.universe_size
    table = phi.table(structure)
    nx, ny = len(phi.x), len(phi.y)
    guards.check("tuples", m ** (nx + ny), "shattering table size")
    flat = table.reshape(m ** nx, m ** ny)
    if not dual:
        flat = flat.T
    weights = [1 << i for i in range(flat.shape[1])]
    fam = [sum(w for w, b in zip(weights, row) if b) for row in flat.tolist()]
    return fam, flat.shape[1]


@dataclass(frozen=True)
class ShatterReport:
    dimension: int
    witness: tuple[tuple[int, ...], ...]


def dual_vc(structure: FiniteStructure, phi: SplitFormula) -> ShatterReport:
    """Largest set of ``y``-tuples shattered by ``{phi(b, y) : b}``, with a witness."""
    fam, n = _families(structure, phi, dual=True)
    pts = shattered_set(fam, n)
    tuples = all_tuples(structure.universe_size, len(phi.y))
    return ShatterReport(len(pts), tuple(tuple(int(v) for v in tuples[p]) for p in pts))


def primal_vc(structure: FiniteStructure, phi: SplitFormula) -> ShatterReport:
    fam, n = _families(structure, phi, dual=False)
    pts = shattered_set(fam, n)
    tuples = all_tuples(structure.universe_size, len(phi.x))
    return ShatterReport(len(pts), tuple(tuple(int(v) for v in tuples[p]) for p in pts))
