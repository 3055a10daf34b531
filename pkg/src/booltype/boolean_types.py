"""Boolean-valued types: homomorphisms from a formula algebra into a finite algebra.

A type is stored by the images of the formula algebra's atoms.  Extensions
to a larger parameter set refine each atom into finer atoms, and an
extension is a choice, for each codomain atom below ``p(P)``, of one finer
atom inside ``P``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterable, Iterator, Sequence

from . import guards
from .algebra import (
    Element, FiniteBooleanAlgebra, Homomorphism, Subalgebra, all_homomorphisms, automorphisms,
    generated_subalgebra, is_independent, join, powerset_algebra, sikorski_extendable,
)
from .definable import (
    FormulaAlgebra, SplitFormula, build_formula_algebra, dual_vc, instance_elements, shattered_set, split,
)
from .errors import BooltypeError, InsufficientShattering
from .formula import Formula, parse
from .structure import FiniteStructure

# the two-element algebra {0, 1}
TWO = FiniteBooleanAlgebra(1, name="2")


@dataclass(frozen=True)
class CompleteType:
    """An atom of a formula algebra (an ultrafilter of a finite algebra)."""

    domain: FormulaAlgebra
    atom: int

    def __post_init__(self):
        if not 0 <= self.atom < self.domain.atom_count:
            raise BooltypeError(f"no atom {self.atom} in {self.domain.algebra.name}")

    def contains(self, e: Element) -> bool:
        return e.mask >> self.atom & 1 == 1

    def representative(self) -> tuple[int, ...]:
        return self.domain.representative(self.atom)

    def witness(self) -> Formula:
        return self.domain.witness(self.atom)

    def as_boolean_type(self) -> BooleanType:
        return BooleanType(self.domain, TWO, tuple(TWO.one if i == self.atom else TWO.zero
                                                     for i in range(self.domain.atom_count)))

    def __str__(self) -> str:
        return f"tp{self.representative()}"


@dataclass(frozen=True)
class BooleanType:
    domain: FormulaAlgebra
    codomain: FiniteBooleanAlgebra
    atom_images: tuple[Element, ...]

    def __post_init__(self):
        object.__setattr__(self, "atom_images", tuple(self.atom_images))
        self.hom  # validates disjointness and cover

    def __repr__(self) -> str:
        return f"BooleanType({self.domain!r} -> 2^{self.codomain.atom_count}, {[img.mask for img in self.atom_images]})"

    @property
    def hom(self) -> Homomorphism:
        return Homomorphism(self.domain.algebra, self.codomain, self.atom_images)

    @property
    def params(self) -> tuple[int, ...]:
        return self.domain.params

    @property
    def structure(self) -> FiniteStructure:
        return self.domain.structure

    def __call__(self, e: Element) -> Element:
        if e.algebra is not self.domain.algebra:
            raise BooltypeError("element is not in the type's domain")
        mask = 0
        for i in e.atoms:
            mask |= self.atom_images[i].mask
        return self.codomain.from_mask(mask)

    def evaluate(self, f: Formula | str) -> Element:
        return self(self.domain.element(f))

    def image(self) -> Subalgebra:
        return self.hom.image()

    def masks(self) -> tuple[int, ...]:
        return tuple(e.mask for e in self.atom_images)

    def compose(self, sigma: Homomorphism) -> BooleanType:
        """``sigma o self``; ``sigma`` must be defined on the image."""
        return BooleanType(self.domain, sigma.codomain, tuple(sigma(e) for e in self.atom_images))


def type_from_assignment(fa: FormulaAlgebra, codomain: FiniteBooleanAlgebra, atom_images) -> BooleanType:
    """Build a type from per-atom images given as Elements, masks or atom-index sets."""
    images = []
    for img in atom_images:
        if isinstance(img, Element):
            images.append(img)
        elif isinstance(img, int):
            images.append(codomain.from_mask(img))
        else:
            images.append(codomain.element(img))
    return BooleanType(fa, codomain, tuple(images))


def evaluate_type(p: BooleanType, f: Formula | str) -> Element:
    return p.evaluate(f)


def enumerate_types(fa: FormulaAlgebra, codomain: FiniteBooleanAlgebra) -> list[BooleanType]:
    guards.check("tuples", fa.atom_count ** codomain.atom_count, "number of types")
    return [BooleanType(fa, codomain, h.atom_images) for h in all_homomorphisms(fa.algebra, codomain)]


# --- support and decomposition ----------------------------------------------

def support(q: BooleanType) -> list[CompleteType]:
    """Complete types with nonzero value, in atom order."""
    return [CompleteType(q.domain, i) for i, img in enumerate(q.atom_images) if not img.is_zero]


def support_by_formulas(q: BooleanType) -> list[CompleteType]:
    """Complete types all of whose formulas get a nonzero value (exhaustive over the algebra)."""
    out = []
    for i in range(q.domain.atom_count):
        if all(not q(e).is_zero for e in q.domain.algebra.elements() if e.mask >> i & 1):
            out.append(CompleteType(q.domain, i))
    return out


def decompose(q: BooleanType) -> list[tuple[Element, CompleteType]]:
    """``q = sum of b_r * r`` over the support, with ``b_r`` the value of ``r``'s atom."""
    return [(q.atom_images[r.atom], r) for r in support(q)]


def recompose(parts: Sequence[tuple[Element, CompleteType]], e: Element, codomain: FiniteBooleanAlgebra) -> Element:
    return join((b for b, r in parts if r.contains(e)), codomain)


# --- products of complete types ---------------------------------------------

def split_product_type(p: BooleanType) -> list[CompleteType]:
    """Coordinate ``i`` of a type into ``2**n`` is the atom whose image holds codomain atom ``i``."""
    owner = [None] * p.codomain.atom_count
    for a, img in enumerate(p.atom_images):
        for j in img.atoms:
            owner[j] = a
    return [CompleteType(p.domain, a) for a in owner]


def merge_product_type(types: Sequence[CompleteType], codomain: FiniteBooleanAlgebra | None = None) -> BooleanType:
    if not types:
        raise BooltypeError("at least one coordinate is required")
    fa = types[0].domain
    if any(t.domain is not fa for t in types):
        raise BooltypeError("coordinates must share a formula algebra")
    if codomain is None:
        codomain = powerset_algebra(len(types))
    if codomain.atom_count != len(types):
        raise BooltypeError("codomain needs one atom per coordinate")
    masks = [0] * fa.atom_count
    for j, t in enumerate(types):
        masks[t.atom] |= 1 << j
    return BooleanType(fa, codomain, tuple(codomain.from_mask(mk) for mk in masks))


def encode_as_tuple_type(ps: Sequence[CompleteType]) -> CompleteType:
    """Complete type over the parameters of the concatenated least realizations."""
    if not ps:
        raise BooltypeError("at least one component type is required")
    fa = ps[0].domain
    if any(p.domain is not fa for p in ps):
        raise BooltypeError("component types must share a formula algebra")
    t = tuple(v for p in ps for v in p.representative())
    big = build_formula_algebra(fa.structure, fa.k * len(ps), fa.params)
    return CompleteType(big, big.atom_of(t))


# --- fingerprints and conjugacy ---------------------------------------------

@dataclass(frozen=True)
class TypeFingerprint:
    """Image subalgebra with its enumerated nonzero elements, plus the companion types.

    ``companion[i]`` is the atom reached through the principal ultrafilter at
    the earliest image atom below ``enumeration[i]``.
    """

    image_blocks: tuple[int, ...]
    enumeration: tuple[int, ...]
    companion: tuple[int, ...]


def fingerprint(p: BooleanType) -> TypeFingerprint:
    image = p.image()
    blocks = image.blocks
    enum = tuple(sorted(e.mask for e in image.elements() if not e.is_zero))
    owner = {img.mask: a for a, img in enumerate(p.atom_images) if img.mask}
    companion = []
    for el in enum:
        least = min(b for b in blocks if b & el == b)
        companion.append(owner[least])
    return TypeFingerprint(blocks, enum, tuple(companion))


def companion_types(p: BooleanType) -> list[CompleteType]:
    return [CompleteType(p.domain, a) for a in fingerprint(p).companion]


def atom_permutation(fa: FormulaAlgebra, g: Sequence[int]) -> tuple[int, ...]:
    """Action on atoms of an automorphism that fixes the parameters setwise."""
    return tuple(fa.atom_of(tuple(g[v] for v in fa.representative(i))) for i in range(fa.atom_count))


def elementary_permutations(fa: FormulaAlgebra) -> list[tuple[int, ...]]:
    """Distinct atom permutations induced by automorphisms fixing the parameters setwise."""
    group = fa.structure.automorphisms.setwise_stabilizer(fa.params)
    return sorted({atom_permutation(fa, g) for g in group})


def push_forward(p: BooleanType, perm: Sequence[int]) -> BooleanType:
    """``pi * p``: the value at ``perm[P]`` is the old value at ``P``."""
    images = [None] * len(perm)
    for a, b in enumerate(perm):
        images[b] = p.atom_images[a]
    return BooleanType(p.domain, p.codomain, tuple(images))


def image_conjugacy(p1: BooleanType, p2: BooleanType) -> Homomorphism | None:
    """The isomorphism ``sigma`` of image subalgebras with ``p1 = sigma o p2``, if any."""
    if p1.domain is not p2.domain or p1.codomain is not p2.codomain:
        return None
    pairs = list(zip(p2.atom_images, p1.atom_images))
    if any(a.is_zero != b.is_zero for a, b in pairs):
        return None
    nz = sorted(((a, b) for a, b in pairs if not a.is_zero), key=lambda ab: ab[0].mask)
    domain = p2.image()
    sigma = Homomorphism(domain, p1.codomain, tuple(b for _, b in nz))
    assert p2.compose(sigma) == p1
    return sigma


def elementary_conjugacy(p1: BooleanType, p2: BooleanType) -> tuple[int, ...] | None:
    """An atom permutation ``pi`` with ``pi * p1 = p2``, if any."""
    if p1.domain is not p2.domain or p1.codomain is not p2.codomain:
        return None
    for perm in elementary_permutations(p1.domain):
        if push_forward(p1, perm) == p2:
            return perm
    return None


def full_conjugacy(p1: BooleanType, p2: BooleanType) -> tuple[tuple[int, ...], Homomorphism] | None:
    """``(pi, sigma)`` with ``sigma o (pi * p2) = p1``, if any."""
    if p1.domain is not p2.domain or p1.codomain is not p2.codomain:
        return None
    for perm in elementary_permutations(p2.domain):
        sigma = image_conjugacy(p1, push_forward(p2, perm))
        if sigma is not None:
            return perm, sigma
    return None


MODES = ("elementary", "image", "full")


def conjugate(p1: BooleanType, p2: BooleanType, mode: str) -> bool:
    if mode == "elementary":
        return elementary_conjugacy(p1, p2) is not None
    if mode == "image":
        return image_conjugacy(p1, p2) is not None
    if mode == "full":
        return full_conjugacy(p1, p2) is not None
    raise BooltypeError(f"unknown conjugacy mode {mode!r}; expected one of {', '.join(MODES)}")


def classify(types: Sequence[BooleanType], mode: str) -> list[list[int]]:
    """Partition of indices into conjugacy classes, each class and the list sorted."""
    if mode not in MODES:
        raise BooltypeError(f"unknown conjugacy mode {mode!r}; expected one of {', '.join(MODES)}")
    classes: list[list[int]] = []
    for i, p in enumerate(types):
        for cls in classes:
            if conjugate(types[cls[0]], p, mode):
                cls.append(i)
                break
        else:
            classes.append([i])
    return classes


def fingerprint_conjugate(p1: BooleanType, p2: BooleanType) -> bool:
    """Images conjugate by an enumeration-preserving isomorphism and companions conjugate by one permutation."""
    f1, f2 = fingerprint(p1), fingerprint(p2)
    if len(f1.image_blocks) != len(f2.image_blocks):
        return False
    pos = {a: i for i, a in enumerate(f1.enumeration)}
    sigma = {b: f2.enumeration[pos[b]] for b in f1.image_blocks}
    if sorted(sigma.values()) != sorted(f2.image_blocks):
        return False
    for a, b in zip(f1.enumeration, f2.enumeration):
        image = 0
        for blk in f1.image_blocks:
            if blk & a:
                image |= sigma[blk]
        if image != b:
            return False
    for perm in elementary_permutations(p1.domain):
        if all(perm[a] == b for a, b in zip(f1.companion, f2.companion)):
            return True
    return False


# --- extensions to larger parameter sets -------------------------------------

def refinement_map(coarse: FormulaAlgebra, fine: FormulaAlgebra) -> tuple[int, ...]:
    """For each atom of ``fine`` the atom of ``coarse`` containing it."""
    if coarse.structure is not fine.structure or coarse.k != fine.k:
        raise BooltypeError("algebras over different structures or tuple lengths")
    if not set(coarse.params) <= set(fine.params):
        raise BooltypeError("the finer algebra must have more parameters")
    return tuple(coarse.atom_of(fine.representative(i)) for i in range(fine.atom_count))


def fine_atoms(coarse: FormulaAlgebra, fine: FormulaAlgebra) -> list[list[int]]:
    """For each coarse atom the fine atoms inside it, in order."""
    out: list[list[int]] = [[] for _ in range(coarse.atom_count)]
    for f, c in enumerate(refinement_map(coarse, fine)):
        out[c].append(f)
    return out


def lift(e: Element, coarse: FormulaAlgebra, fine: FormulaAlgebra) -> Element:
    parts = fine_atoms(coarse, fine)
    return fine.algebra.element(f for c in e.atoms for f in parts[c])


def restrict(q: BooleanType, coarse: FormulaAlgebra) -> BooleanType:
    parts = fine_atoms(coarse, q.domain)
    return BooleanType(coarse, q.codomain, tuple(join((q.atom_images[f] for f in fs), q.codomain) for fs in parts))


def _owner_of_codomain_atoms(p: BooleanType) -> list[int]:
    owner = [0] * p.codomain.atom_count
    for a, img in enumerate(p.atom_images):
        for j in img.atoms:
            owner[j] = a
    return owner


def count_extensions(p: BooleanType, fine: FormulaAlgebra) -> int:
    parts = fine_atoms(p.domain, fine)
    return prod(len(parts[a]) ** len(img) for a, img in enumerate(p.atom_images))


def extensions(p: BooleanType, fine: FormulaAlgebra) -> Iterator[BooleanType]:
    """Every extension of ``p`` to ``fine``: each codomain atom picks a finer atom of its owner."""
    parts = fine_atoms(p.domain, fine)
    owner = _owner_of_codomain_atoms(p)
    for choice in itertools.product(*(parts[owner[j]] for j in range(p.codomain.atom_count))):
        masks = [0] * fine.atom_count
        for j, f in enumerate(choice):
            masks[f] |= 1 << j
        yield BooleanType(fine, p.codomain, tuple(p.codomain.from_mask(mk) for mk in masks))


def canonical_extension(p: BooleanType, fine: FormulaAlgebra) -> BooleanType:
    """The extension found by the Sikorski criterion applied to the inclusion of algebras."""
    f = {lift(p.domain.atom(a), p.domain, fine): img for a, img in enumerate(p.atom_images)}
    res = sikorski_extendable(f, fine.algebra, p.codomain)
    if not res.extendable:
        raise AssertionError("extension along an inclusion of algebras must exist")
    return BooleanType(fine, p.codomain, res.witness.atom_images)


def supersets(params: Sequence[int], m: int) -> list[tuple[int, ...]]:
    """Proper supersets of ``params`` inside the universe, by size then lexicographically."""
    rest = [v for v in range(m) if v not in set(params)]
    guards.check("supersets", 2 ** len(rest) - 1, "parameter supersets")
    out = []
    for r in range(1, len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            out.append(tuple(sorted(set(params) | set(extra))))
    return out


def realized_sum(p: BooleanType) -> Element:
    """Join of the values of the single-tuple atoms (the formulas ``x = a``)."""
    return join((p.atom_images[i] for i in p.domain.singleton_atoms()), p.codomain)


def is_realized(p: BooleanType) -> bool:
    return realized_sum(p).is_one


def smoothness_failure(p: BooleanType) -> tuple[int, ...] | None:
    """First proper superset over which ``p`` has more than one extension."""
    for b in supersets(p.params, p.domain.m):
        fine = build_formula_algebra(p.structure, p.domain.k, b)
        if count_extensions(p, fine) != 1:
            return b
    return None


def is_smooth_within(p: BooleanType) -> bool:
    """Exactly one extension to every parameter superset inside the universe."""
    return smoothness_failure(p) is None


@dataclass(frozen=True)
class MaximalityReport:
    sum: Element
    is_maximal: bool
    blocking: tuple[Element, ...]
    # a superset and an extension whose realized sum is larger, when not maximal
    raised: tuple[tuple[int, ...], BooleanType] | None = None


def max_extension_sum(p: BooleanType, fine: FormulaAlgebra) -> Element:
    """Largest realized sum among the extensions of ``p`` to ``fine``."""
    parts = fine_atoms(p.domain, fine)
    single = set(fine.singleton_atoms())
    return join((img for a, img in enumerate(p.atom_images) if any(f in single for f in parts[a])), p.codomain)


def blocking_atoms(p: BooleanType) -> list[Element]:
    """Nonzero codomain elements below the complement of the sum that lie inside one image atom.

    These are exactly the elements that are atoms of a subalgebra generated
    by the image together with themselves.
    """
    rest = ~realized_sum(p)
    out = []
    for img in p.atom_images:
        inside = img & rest
        for sub in range(1, 1 << len(inside)):
            bits = inside.atoms
            mask = sum(1 << bits[i] for i in range(len(bits)) if sub >> i & 1)
            out.append(p.codomain.from_mask(mask))
    return sorted(out, key=lambda e: e.mask)


def raise_sum(p: BooleanType, block: Element) -> tuple[tuple[int, ...], BooleanType]:
    """Extension whose realized sum contains ``block`` (which must be a blocking atom).

    Pins the least tuple ``c`` of the atom ``P`` under ``block`` as a new
    parameter, sends ``block`` to the atom ``{c}`` and the rest of ``p(P)`` to
    the next finer atom of ``P``.
    """
    owner = next((a for a, img in enumerate(p.atom_images) if not block.is_zero and block <= img), None)
    if owner is None or not (block & realized_sum(p)).is_zero:
        raise BooltypeError(f"{block} is not a blocking atom")
    c = p.domain.representative(owner)
    b = tuple(sorted(set(p.params) | set(c)))
    fine = build_formula_algebra(p.structure, p.domain.k, b)
    parts = fine_atoms(p.domain, fine)
    point = fine.atom_of(c)
    other = next(f for f in parts[owner] if f != point)
    masks = [0] * fine.atom_count
    for a, img in enumerate(p.atom_images):
        if a == owner:
            masks[point] |= block.mask
            masks[other] |= (img - block).mask
        else:
            masks[parts[a][0]] |= img.mask
    q = BooleanType(fine, p.codomain, tuple(p.codomain.from_mask(mk) for mk in masks))
    assert restrict(q, p.domain) == p
    return b, q


def maximal_sum_and_blocking_atoms(p: BooleanType) -> MaximalityReport:
    total = realized_sum(p)
    maximal = True
    for b in supersets(p.params, p.domain.m):
        fine = build_formula_algebra(p.structure, p.domain.k, b)
        if max_extension_sum(p, fine) != total:
            maximal = False
            break
    blocking = tuple(blocking_atoms(p))
    if maximal == bool(blocking):
        raise AssertionError("blocking atoms disagree with the extension search")
    raised = None
    if blocking:
        b, q = raise_sum(p, blocking[0])
        if not (total < realized_sum(q)):
            raise AssertionError("the constructed extension does not raise the sum")
        raised = (b, q)
    return MaximalityReport(total, maximal, blocking, raised)


@dataclass(frozen=True)
class NonConjugatePair:
    params: tuple[int, ...]
    q1: BooleanType
    q2: BooleanType
    # the finer atom where q1 is strictly below q2
    atom: int


def non_conjugate_extensions(p: BooleanType) -> NonConjugatePair | None:
    """Two extensions no codomain automorphism carries one to the other (None when smooth)."""
    b = smoothness_failure(p)
    if b is None:
        return None
    fine = build_formula_algebra(p.structure, p.domain.k, b)
    parts = fine_atoms(p.domain, fine)
    owner = next(a for a, img in enumerate(p.atom_images) if not img.is_zero and len(parts[a]) > 1)
    target, other = parts[owner][0], parts[owner][1]
    m1 = [0] * fine.atom_count
    m2 = [0] * fine.atom_count
    for a, img in enumerate(p.atom_images):
        if a == owner:
            m1[other] |= img.mask
            m2[target] |= img.mask
        else:
            m1[parts[a][0]] |= img.mask
            m2[parts[a][0]] |= img.mask
    q1 = BooleanType(fine, p.codomain, tuple(p.codomain.from_mask(mk) for mk in m1))
    q2 = BooleanType(fine, p.codomain, tuple(p.codomain.from_mask(mk) for mk in m2))
    return NonConjugatePair(b, q1, q2, target)


def codomain_conjugate(q1: BooleanType, q2: BooleanType) -> bool:
    """Some automorphism of the codomain carries ``q1`` to ``q2``."""
    return any(q1.compose(s) == q2 for s in automorphisms(q1.codomain))


# --- images of phi-restrictions -----------------------------------------------

def instance_values(p: BooleanType, phi: SplitFormula) -> list[Element]:
    """Distinct values ``p(phi(x, a))`` over parameter tuples ``a``, sorted."""
    vals = {p(e) for _, e in instance_elements(p.domain, phi)}
    return sorted(vals, key=lambda e: e.mask)


def restricted_image(p: BooleanType, phi: SplitFormula) -> Subalgebra:
    """Image of ``p`` on the subalgebra generated by the instances of ``phi``."""
    return generated_subalgebra(instance_values(p, phi), p.codomain)


def largest_independent(elements: Sequence[Element]) -> tuple[Element, ...]:
    """A largest independent subset (grown level by level; subsets of independent sets are independent)."""
    pool = [e for e in elements if not e.is_zero and not e.is_one]
    pool = sorted(set(pool), key=lambda e: e.mask)
    best: tuple[Element, ...] = ()
    level = [()]
    cap = guards.limit("search")
    while level:
        nxt = []
        for s in level:
            start = pool.index(s[-1]) + 1 if s else 0
            for e in pool[start:]:
                cand = s + (e,)
                if is_independent(cand):
                    nxt.append(cand)
                    if len(nxt) > cap * cap:
                        guards.check("search", len(nxt), "independent-set candidates")
        if nxt:
            best = nxt[0]
        level = nxt
    return best


@dataclass(frozen=True)
class ImageBoundReport:
    dual_vc: int
    values: tuple[Element, ...]
    largest_independent: tuple[Element, ...]

    @property
    def holds(self) -> bool:
        return len(self.largest_independent) <= self.dual_vc


def check_image_bound(p: BooleanType, phi: SplitFormula) -> ImageBoundReport:
    """Instance values of ``phi`` under ``p`` contain no independent set beyond the dual VC dimension."""
    values = tuple(instance_values(p, phi))
    n = dual_vc(p.structure, phi).dimension
    return ImageBoundReport(n, values, largest_independent(values))


def construct_surjective_type(structure: FiniteStructure, phi: SplitFormula, codomain: FiniteBooleanAlgebra,
                              params: Iterable[int] | None = None) -> BooleanType:
    """A type over ``params`` (default: the universe) whose ``phi``-image is the whole codomain.

    Needs one parameter tuple per codomain atom, jointly shattered by the
    sets ``phi(b, y)``; their instances are independent, so sending them to
    the codomain atoms extends to a homomorphism.
    """
    m = structure.universe_size
    params = tuple(range(m)) if params is None else tuple(sorted(set(params)))
    fa = build_formula_algebra(structure, len(phi.x), params)
    n = codomain.atom_count
    pool = list(itertools.product(params, repeat=len(phi.y)))
    table = phi.table(structure).reshape(m ** len(phi.x), *([m] * len(phi.y)))
    family = []
    for row in table:
        family.append(sum(1 << i for i, a in enumerate(pool) if row[a]))
    pts = shattered_set(family, len(pool), limit=n)
    if len(pts) < n:
        raise InsufficientShattering(
            f"need {n} parameter tuples shattered by {phi.formula}, the largest shattered set has {len(pts)}"
        )
    pts = pts[:n]
    f = {}
    for j, pt in enumerate(pts):
        a = pool[pt]
        inst = fa.element_from_array(phi.table(structure)[(Ellipsis,) + a] if a else phi.table(structure))
        f[inst] = codomain.atom(j)
    res = sikorski_extendable(f, fa.algebra, codomain)
    if not res.extendable:
        raise AssertionError("independent instances must extend")
    p = BooleanType(fa, codomain, res.witness.atom_images)
    assert restricted_image(p, phi).block_count == codomain.atom_count
    return p


# --- image maximization -------------------------------------------------------

def default_templates(structure: FiniteStructure, k: int) -> list[SplitFormula]:
    """Tuple equality plus ``R(x0, y0, ...)`` for every relation."""
    eq = " & ".join(f"x{i} = y{i}" for i in range(k))
    out = [split(eq, k, structure)]
    for rel in structure.relations:
        args = ["x0"] + [f"y{i}" for i in range(rel.arity - 1)]
        out.append(split(parse(f"{rel.symbol}(" + ", ".join(args) + ")", structure), k, structure))
    return out


@dataclass(frozen=True)
class MaximizeResult:
    params: tuple[int, ...]
    type: BooleanType
    # (template index, codomain element mask, parameters, parameter tuple) per adoption
    steps: tuple[tuple[int, int, tuple[int, ...], tuple[int, ...]], ...]
    smooth: bool


def maximize_image(p: BooleanType, templates: Sequence[SplitFormula] | None = None) -> MaximizeResult:
    """Extend ``p`` until no extension enlarges the image of any template.

    Scans (template, codomain element) pairs; when an element is missing from
    the image and some extension over a larger parameter set gives it to one
    instance, adopts the first such extension.  Each adoption strictly grows
    one image, so the loop stops.
    """
    s = p.structure
    k = p.domain.k
    if templates is None:
        templates = default_templates(s, k)
    q = p
    steps = []
    tables = [t.table(s) for t in templates]
    progress = True
    while progress:
        progress = False
        for ti, phi in enumerate(templates):
            image = restricted_image(q, phi)
            for e in q.codomain.elements():
                if image.contains(e):
                    continue
                found = _achieve(q, phi, tables[ti], e)
                if found is not None:
                    b, a, q = found
                    steps.append((ti, e.mask, b, a))
                    progress = True
                    break
            if progress:
                break
    return MaximizeResult(q.params, q, tuple(steps), is_smooth_within(q))


def _achieve(q: BooleanType, phi: SplitFormula, table, e: Element):
    s = q.structure
    for b in supersets(q.params, q.domain.m):
        fine = build_formula_algebra(s, q.domain.k, b)
        parts = fine_atoms(q.domain, fine)
        for a in itertools.product(b, repeat=len(phi.y)):
            inst = fine.element_from_array(table[(Ellipsis,) + a] if a else table)
            lo = hi = 0
            for c, img in enumerate(q.atom_images):
                inside = [f for f in parts[c] if inst.mask >> f & 1]
                if len(inside) == len(parts[c]):
                    lo |= img.mask
                if inside:
                    hi |= img.mask
            if lo & ~e.mask or e.mask & ~hi:
                continue
            masks = [0] * fine.atom_count
            for c, img in enumerate(q.atom_images):
                inside = [f for f in parts[c] if inst.mask >> f & 1]
                outside = [f for f in parts[c] if not inst.mask >> f & 1]
                if inside:
                    masks[inside[0]] |= img.mask & e.mask
                if outside:
                    masks[outside[0]] |= img.mask & ~e.mask
            new = BooleanType(fine, q.codomain, tuple(q.codomain.from_mask(mk) for mk in masks))
            assert new(inst) == e and restrict(new, q.domain) == q
            return b, a, new
    return None


# --- dense linear order ---------------------------------------------------------

def chain_interval_images(p: BooleanType, symbol: str = "<") -> list[Element]:
    """Values of ``x < a0``, ``a_i <= x < a_(i+1)`` and ``a_(n-1) <= x`` over a chain ``0 < ... < n-1``."""
    n = p.domain.m
    if p.domain.k != 1:
        raise BooltypeError("interval images need one object variable")
    forms = [f"x0 {symbol} c0"]
    for i in range(n - 1):
        forms.append(f"!(x0 {symbol} c{i}) & x0 {symbol} c{i + 1}")
    forms.append(f"!(x0 {symbol} c{n - 1})")
    return [p.evaluate(parse(f, p.structure)) for f in forms]
