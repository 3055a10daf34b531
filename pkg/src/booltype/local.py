"""Local types, Cantor-Bendixson derivatives over finite algebras, peeling, ladders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import guards
from .algebra import Element, FiniteBooleanAlgebra, Homomorphism, Subalgebra, join, relative_algebra
from .boolean_types import BooleanType
from .definable import FormulaAlgebra, SplitFormula, all_tuples, phi_restricted_algebra
from .errors import BooltypeError, GuardExceeded
from .structure import FiniteStructure


@dataclass(frozen=True)
class TypeSpace:
    """Points are atoms of ``ambient.algebra``; the clopen sets are the elements of ``ambient``.

    A point of ``subspace`` is isolated when the ambient block holding it
    meets the subspace in that point alone.
    """

    ambient: Subalgebra
    subspace: frozenset[int]

    def __post_init__(self):
        n = self.ambient.algebra.atom_count
        if any(not 0 <= x < n for x in self.subspace):
            raise BooltypeError("subspace points must be atoms of the ambient algebra")
        object.__setattr__(self, "subspace", frozenset(self.subspace))

    @classmethod
    def full(cls, ambient: Subalgebra) -> TypeSpace:
        return cls(ambient, frozenset(range(ambient.algebra.atom_count)))

    def isolated(self) -> frozenset[int]:
        out = set()
        for blk in self.ambient.blocks:
            inside = [x for x in self.subspace if blk >> x & 1]
            if len(inside) == 1:
                out.add(inside[0])
        return frozenset(out)


def cb_derivative(space: TypeSpace) -> TypeSpace:
    return TypeSpace(space.ambient, space.subspace - space.isolated())


def cb_sequence(space: TypeSpace) -> list[TypeSpace]:
    """``X, X', X'', ...`` up to the first repeat."""
    seq = [space]
    while True:
        nxt = cb_derivative(seq[-1])
        if nxt.subspace == seq[-1].subspace:
            return seq
        seq.append(nxt)


def cb_rank(space: TypeSpace) -> int | None:
    """Least ``n`` with the ``(n+1)``-th derivative empty; None if a perfect kernel remains."""
    seq = cb_sequence(space)
    if seq[-1].subspace:
        return None
    return max(0, len(seq) - 2)


# --- local types ------------------------------------------------------------------

@dataclass(frozen=True)
class LocalBooleanType:
    """A homomorphism from a subalgebra of a formula algebra (for instance a phi-algebra)."""

    formula_algebra: FormulaAlgebra
    domain: Subalgebra
    codomain: FiniteBooleanAlgebra
    atom_images: tuple[Element, ...]

    def __post_init__(self):
        object.__setattr__(self, "atom_images", tuple(self.atom_images))
        if self.domain.algebra is not self.formula_algebra.algebra:
            raise BooltypeError("the domain must be a subalgebra of the formula algebra")
        self.hom

    @property
    def hom(self) -> Homomorphism:
        return Homomorphism(self.domain, self.codomain, self.atom_images)

    def __call__(self, e: Element) -> Element:
        return self.hom(e)


def local_restriction(q: BooleanType, domain: Subalgebra) -> LocalBooleanType:
    images = tuple(q(Element(q.domain.algebra, b)) for b in domain.blocks)
    return LocalBooleanType(q.domain, domain, q.codomain, images)


def phi_type(q: BooleanType, phi: SplitFormula) -> LocalBooleanType:
    """Restriction of ``q`` to the algebra generated by the instances of ``phi``."""
    return local_restriction(q, phi_restricted_algebra(q.domain, phi))


# --- peeling decomposition ---------------------------------------------------------

@dataclass(frozen=True)
class PeelLevel:
    level: int
    # residual unit at the start of this level, in the original codomain
    unit: Element
    # (c, r): c in the original codomain, r a block index of the domain
    entries: tuple[tuple[Element, int], ...]


def _as_local(q) -> LocalBooleanType:
    if isinstance(q, LocalBooleanType):
        return q
    if isinstance(q, BooleanType):
        return local_restriction(q, Subalgebra.whole(q.domain.algebra))
    raise TypeError(f"not a type: {q!r}")


def decompose_peeling(q) -> list[PeelLevel]:
    """Peel off isolated support points level by level until the residual unit is 0.

    At level ``a`` the type is projected into the relative algebra below the
    residual unit ``b_a``; the support points isolated by a domain element
    ``theta_r`` contribute ``c_r = q_a(theta_r)``, and ``b_(a+1)`` drops them.
    """
    local = _as_local(q)
    codomain = local.codomain
    algebra = local.domain.algebra
    blocks = local.domain.blocks
    levels: list[PeelLevel] = []
    unit = codomain.one
    while not unit.is_zero:
        rel, proj = relative_algebra(unit)
        values = [proj(img) for img in local.atom_images]
        points = [r for r, v in enumerate(values) if not v.is_zero]
        # every support point is isolated by its own domain block
        entries = []
        for r in points:
            theta = Element(algebra, blocks[r])
            entries.append((rel.to_parent(proj(local(theta))), r))
        peeled = join((c for c, _ in entries), codomain)
        if peeled.is_zero:
            raise AssertionError("peeling made no progress")
        levels.append(PeelLevel(len(levels), unit, tuple(entries)))
        unit = unit - peeled
    return levels


def peeling_entries(levels: list[PeelLevel]) -> list[tuple[Element, int]]:
    return [entry for lvl in levels for entry in lvl.entries]


def peeling_value(levels: list[PeelLevel], e: Element, domain: Subalgebra, codomain: FiniteBooleanAlgebra) -> Element:
    """``sum of c_r * r(e)`` over every level; ``e`` must lie in ``domain``."""
    hit = set(domain.block_indices(e))
    return join((c for c, r in peeling_entries(levels) if r in hit), codomain)


# --- ladders ---------------------------------------------------------------------

@dataclass(frozen=True)
class LadderReport:
    formula: str
    max_ladder: int
    a: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]
    capped: bool = False

    def verify(self, structure: FiniteStructure, phi: SplitFormula) -> bool:
        table = phi.table(structure)
        return all(bool(table[a + b]) == (i <= j)
                   for i, a in enumerate(self.a) for j, b in enumerate(self.b))


def ladder_dimension(structure: FiniteStructure, phi: SplitFormula, cap: int | None = None) -> LadderReport:
    """Longest ``a_0..a_(n-1)``, ``b_0..b_(n-1)`` with ``phi(a_i, b_j)`` iff ``i <= j``.

    Depth-first search in lexicographic order; the first ladder of maximal
    length wins.  ``cap`` (default: the ``search`` guard) bounds the length.
    """
    m = structure.universe_size
    cap = guards.limit("search") if cap is None else cap
    table = phi.table(structure)
    nx, ny = len(phi.x), len(phi.y)
    guards.check("tuples", m ** (nx + ny), "ladder table size")
    t = table.reshape(m ** nx, m ** ny)
    # tuples with equal rows (columns) are interchangeable and a ladder uses at most one
    _, rows = np.unique(t, axis=0, return_index=True)
    _, cols = np.unique(t, axis=1, return_index=True)
    rows, cols = np.sort(rows), np.sort(cols)
    t = t[np.ix_(rows, cols)]
    xs = all_tuples(m, nx)[rows]
    ys = all_tuples(m, ny)[cols]
    best: list = [[], []]
    capped = False
    nodes = [0]
    budget = 10 * guards.limit("tuples")

    def dfs(as_: list[int], bs: list[int], cand_a: np.ndarray, cand_b: np.ndarray) -> bool:
        nonlocal capped
        if len(as_) > len(best[0]):
            best[0], best[1] = list(as_), list(bs)
        if len(as_) >= cap:
            capped = True
            return True
        if len(as_) + min(int(cand_a.sum()), int(cand_b.sum())) <= len(best[0]):
            return False
        # new a must fail every earlier b; new b must hold for every earlier a
        for a in np.flatnonzero(cand_a):
            for b in np.flatnonzero(cand_b & t[a]):
                nodes[0] += 1
                if nodes[0] > budget:
                    raise GuardExceeded(
                        f"ladder search visited {budget} nodes; longest ladder found so far has length {len(best[0])}"
                    )
                nxt_a = cand_a & ~t[:, b]
                nxt_b = cand_b & t[a]
                if dfs(as_ + [int(a)], bs + [int(b)], nxt_a, nxt_b):
                    return True
        return False

    dfs([], [], np.ones(len(xs), dtype=bool), np.ones(len(ys), dtype=bool))
    a = tuple(tuple(int(v) for v in xs[i]) for i in best[0])
    b = tuple(tuple(int(v) for v in ys[j]) for j in best[1])
    report = LadderReport(str(phi.formula), len(a), a, b, capped)
    assert report.verify(structure, phi)
    return report
