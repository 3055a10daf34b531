"""Finite Boolean algebras, subalgebras and homomorphisms.

A finite Boolean algebra is the powerset of its atoms, so an element is
stored as a bitmask over ``range(atom_count)``.  Subalgebras are atom
partitions and a homomorphism out of a finite algebra is determined by the
images of its atoms (pairwise disjoint, joining to 1).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from . import guards
from .errors import AlgebraMismatch, BooltypeError, InvalidHomomorphism, InvalidMeasure, OutOfInterval


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(eq=False)
class FiniteBooleanAlgebra:
    """The powerset algebra on ``atom_count`` atoms.

    Instances compare by identity: two algebras with the same number of atoms
    are still different algebras, and elements of one cannot be combined with
    elements of the other.
    """

    atom_count: int
    labels: tuple[str, ...] | None = None
    name: str | None = None
    # set for relative algebras: the parent algebra and the parent atom
    # index of each of our atoms
    parent: FiniteBooleanAlgebra | None = field(default=None, repr=False)
    parent_atoms: tuple[int, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if not isinstance(self.atom_count, int) or self.atom_count < 1:
            raise BooltypeError("a Boolean algebra needs at least one atom (0 != 1)")
        if self.labels is not None:
            self.labels = tuple(self.labels)
            if len(self.labels) != self.atom_count:
                raise BooltypeError("one label per atom is required")
            if len(set(self.labels)) != self.atom_count:
                raise BooltypeError("atom labels must be distinct")

    @property
    def full_mask(self) -> int:
        return (1 << self.atom_count) - 1

    @property
    def zero(self) -> Element:
        return Element(self, 0)

    @property
    def one(self) -> Element:
        return Element(self, self.full_mask)

    def atom(self, i: int) -> Element:
        if not 0 <= i < self.atom_count:
            raise BooltypeError(f"atom index {i} out of range")
        return Element(self, 1 << i)

    def atoms(self) -> list[Element]:
        return [Element(self, 1 << i) for i in range(self.atom_count)]

    def element(self, atoms: Iterable[int]) -> Element:
        mask = 0
        for i in atoms:
            if not 0 <= i < self.atom_count:
                raise BooltypeError(f"atom index {i} out of range for {self.atom_count} atoms")
            mask |= 1 << i
        return Element(self, mask)

    def from_mask(self, mask: int) -> Element:
        if mask < 0 or mask > self.full_mask:
            raise BooltypeError(f"mask {mask} out of range")
        return Element(self, mask)

    def elements(self) -> Iterator[Element]:
        for mask in range(1 << self.atom_count):
            yield Element(self, mask)

    def __len__(self) -> int:
        return 1 << self.atom_count

    def parse_element(self, text: str) -> Element:
        """Parse ``{0,2}`` or a set of labels such as ``{a,c}``."""
        text = text.strip()
        if not (text.startswith("{") and text.endswith("}")):
            raise BooltypeError(f"element literal must be braced: {text!r}")
        items = [t.strip() for t in text[1:-1].split(",") if t.strip()]
        idx = []
        for item in items:
            if self.labels is not None and item in self.labels:
                idx.append(self.labels.index(item))
            elif re.fullmatch(r"\d+", item):
                idx.append(int(item))
            else:
                raise BooltypeError(f"unknown atom {item!r}")
        return self.element(idx)

    def to_parent(self, e: Element) -> Element:
        """Relabel an element of a relative algebra back into its parent."""
        if self.parent is None:
            raise BooltypeError("not a relative algebra")
        _same(self, e)
        return self.parent.element(self.parent_atoms[i] for i in e.atoms)

    def describe(self) -> str:
        head = f"algebra {self.name or '_'} atoms {self.atom_count}"
        if self.labels:
            head += " labels " + ",".join(self.labels)
        return head


@dataclass(frozen=True)
class Element:
    algebra: FiniteBooleanAlgebra
    mask: int

    def _check(self, other: Element) -> None:
        if not isinstance(other, Element) or other.algebra is not self.algebra:
            raise AlgebraMismatch("operands belong to different algebras")

    def __and__(self, other: Element) -> Element:
        self._check(other)
        return Element(self.algebra, self.mask & other.mask)

    def __or__(self, other: Element) -> Element:
        self._check(other)
        return Element(self.algebra, self.mask | other.mask)

    def __sub__(self, other: Element) -> Element:
        self._check(other)
        return Element(self.algebra, self.mask & ~other.mask)

    def __invert__(self) -> Element:
        return Element(self.algebra, self.algebra.full_mask & ~self.mask)

    def __le__(self, other: Element) -> bool:
        self._check(other)
        return self.mask & other.mask == self.mask

    def __lt__(self, other: Element) -> bool:
        return self <= other and self.mask != other.mask

    def __ge__(self, other: Element) -> bool:
        return other <= self

    def __gt__(self, other: Element) -> bool:
        return other < self

    def __bool__(self) -> bool:
        return self.mask != 0

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    @property
    def atoms(self) -> tuple[int, ...]:
        return _bits(self.mask)

    @property
    def is_zero(self) -> bool:
        return self.mask == 0

    @property
    def is_one(self) -> bool:
        return self.mask == self.algebra.full_mask

    def __repr__(self) -> str:
        labels = self.algebra.labels
        if labels is not None:
            return "{" + ",".join(labels[i] for i in self.atoms) + "}"
        return "{" + ",".join(str(i) for i in self.atoms) + "}"

    __str__ = __repr__


def _same(algebra: FiniteBooleanAlgebra, *elements: Element) -> None:
    for e in elements:
        if e.algebra is not algebra:
            raise AlgebraMismatch("element does not belong to the expected algebra")


def join(elements: Iterable[Element], algebra: FiniteBooleanAlgebra) -> Element:
    mask = 0
    for e in elements:
        _same(algebra, e)
        mask |= e.mask
    return Element(algebra, mask)


def meet(elements: Iterable[Element], algebra: FiniteBooleanAlgebra) -> Element:
    mask = algebra.full_mask
    for e in elements:
        _same(algebra, e)
        mask &= e.mask
    return Element(algebra, mask)


def eval_lattice(op: str, *args: Element):
    """Evaluate ``meet``, ``join``, ``complement``, ``diff`` or ``leq``."""
    if not args:
        raise BooltypeError("eval_lattice needs at least one argument")
    algebra = args[0].algebra
    _same(algebra, *args)
    if op == "meet":
        return meet(args, algebra)
    if op == "join":
        return join(args, algebra)
    if op == "complement":
        if len(args) != 1:
            raise BooltypeError("complement takes one argument")
        return ~args[0]
    if op == "diff":
        if len(args) != 2:
            raise BooltypeError("diff takes two arguments")
        return args[0] - args[1]
    if op == "leq":
        if len(args) != 2:
            raise BooltypeError("leq takes two arguments")
        return args[0] <= args[1]
    raise BooltypeError(f"unknown lattice operation {op!r}")


@dataclass(frozen=True)
class Subalgebra:
    """A subalgebra given by its atoms, a partition of the parent atoms."""

    algebra: FiniteBooleanAlgebra
    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(sorted(self.blocks))
        seen = 0
        for b in blocks:
            if b == 0:
                raise BooltypeError("subalgebra blocks must be nonempty")
            if b & seen:
                raise BooltypeError("subalgebra blocks must be pairwise disjoint")
            seen |= b
        if seen != self.algebra.full_mask:
            raise BooltypeError("subalgebra blocks must cover every atom")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def whole(cls, algebra: FiniteBooleanAlgebra) -> Subalgebra:
        return cls(algebra, tuple(1 << i for i in range(algebra.atom_count)))

    @classmethod
    def trivial(cls, algebra: FiniteBooleanAlgebra) -> Subalgebra:
        return cls(algebra, (algebra.full_mask,))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def atoms(self) -> list[Element]:
        return [Element(self.algebra, b) for b in self.blocks]

    def contains(self, e: Element) -> bool:
        _same(self.algebra, e)
        return all((b & e.mask) in (0, b) for b in self.blocks)

    def elements(self) -> Iterator[Element]:
        for combo in range(1 << len(self.blocks)):
            mask = 0
            for i, b in enumerate(self.blocks):
                if combo >> i & 1:
                    mask |= b
            yield Element(self.algebra, mask)

    def block_indices(self, e: Element) -> tuple[int, ...]:
        """Indices of the blocks making up ``e`` (which must lie in here)."""
        if not self.contains(e):
            raise BooltypeError(f"{e} is not in the subalgebra")
        return tuple(i for i, b in enumerate(self.blocks) if b & e.mask)

    def refines(self, other: Subalgebra) -> bool:
        """True when ``other`` is contained in this subalgebra."""
        return all(self.contains(Element(self.algebra, b)) for b in other.blocks)


def _domain_parts(domain) -> tuple[FiniteBooleanAlgebra, tuple[int, ...]]:
    if isinstance(domain, Subalgebra):
        return domain.algebra, domain.blocks
    if isinstance(domain, FiniteBooleanAlgebra):
        return domain, tuple(1 << i for i in range(domain.atom_count))
    if isinstance(domain, MeasureAlgebra):
        return _domain_parts(domain.algebra)
    raise TypeError(f"not an algebra: {domain!r}")


@dataclass(frozen=True)
class Homomorphism:
    """A Boolean homomorphism out of a finite (sub)algebra.

    ``atom_images[i]`` is the image of the i-th atom (block) of the domain.
    """

    domain: object
    codomain: FiniteBooleanAlgebra
    atom_images: tuple[Element, ...]

    def __post_init__(self):
        object.__setattr__(self, "atom_images", tuple(self.atom_images))
        _, blocks = _domain_parts(self.domain)
        if len(self.atom_images) != len(blocks):
            raise InvalidHomomorphism(
                f"expected {len(blocks)} atom images, got {len(self.atom_images)}"
            )
        seen = 0
        for i, img in enumerate(self.atom_images):
            if not isinstance(img, Element) or img.algebra is not self.codomain:
                raise InvalidHomomorphism(f"image of atom {i} is not in the codomain")
            if img.mask & seen:
                j = next(j for j in range(i) if self.atom_images[j].mask & img.mask)
                raise InvalidHomomorphism(
                    f"images of atoms {j} and {i} overlap in {Element(self.codomain, img.mask & self.atom_images[j].mask)}"
                )
            seen |= img.mask
        if seen != self.codomain.full_mask:
            missing = Element(self.codomain, self.codomain.full_mask & ~seen)
            raise InvalidHomomorphism(f"atom images do not join to 1: missing {missing}")

    @property
    def domain_algebra(self) -> FiniteBooleanAlgebra:
        return _domain_parts(self.domain)[0]

    @property
    def blocks(self) -> tuple[int, ...]:
        return _domain_parts(self.domain)[1]

    def __call__(self, e: Element) -> Element:
        algebra, blocks = _domain_parts(self.domain)
        _same(algebra, e)
        mask = 0
        for b, img in zip(blocks, self.atom_images):
            inter = b & e.mask
            if inter == b:
                mask |= img.mask
            elif inter:
                raise BooltypeError(f"{e} is not in the domain subalgebra")
        return Element(self.codomain, mask)

    def image(self) -> Subalgebra:
        return Subalgebra(self.codomain, tuple(img.mask for img in self.atom_images if img.mask))

    def image_elements(self) -> set[Element]:
        return set(self.image().elements())

    def extends(self, other: Homomorphism) -> bool:
        """Whether this map agrees with ``other`` on ``other``'s domain."""
        algebra, blocks = _domain_parts(other.domain)
        if algebra is not self.domain_algebra or other.codomain is not self.codomain:
            return False
        try:
            return all(self(Element(algebra, b)) == img for b, img in zip(blocks, other.atom_images))
        except BooltypeError:
            return False

    def compose_after(self, sigma: Homomorphism) -> Homomorphism:
        """``sigma o self``; sigma's domain must contain our image."""
        return Homomorphism(self.domain, sigma.codomain, tuple(sigma(img) for img in self.atom_images))


@dataclass(eq=False)
class MeasureAlgebra:
    """A finite algebra with a strictly positive probability measure."""

    algebra: FiniteBooleanAlgebra
    atom_weights: tuple[Fraction, ...]

    def __post_init__(self):
        if any(isinstance(w, float) for w in self.atom_weights):
            raise InvalidMeasure("weights must be exact rationals, not floats")
        weights = tuple(Fraction(w) for w in self.atom_weights)
        if len(weights) != self.algebra.atom_count:
            raise InvalidMeasure("one weight per atom is required")
        if any(w <= 0 for w in weights):
            raise InvalidMeasure("measure algebra weights must be positive")
        if sum(weights) != 1:
            raise InvalidMeasure(f"measure algebra weights sum to {sum(weights)}, not 1")
        self.atom_weights = weights

    def measure(self, e: Element) -> Fraction:
        _same(self.algebra, e)
        return sum((self.atom_weights[i] for i in e.atoms), Fraction(0))


def relative_algebra(b: Element) -> tuple[FiniteBooleanAlgebra, Homomorphism]:
    """The relative algebra below ``b`` and the projection ``a -> a & b``."""
    if b.is_zero:
        raise BooltypeError("the relative algebra below 0 has no unit")
    parent = b.algebra
    atoms = b.atoms
    labels = None
    if parent.labels is not None:
        labels = tuple(parent.labels[i] for i in atoms)
    rel = FiniteBooleanAlgebra(len(atoms), labels=labels, parent=parent, parent_atoms=atoms)
    position = {a: j for j, a in enumerate(atoms)}
    images = tuple(
        rel.atom(position[i]) if i in position else rel.zero for i in range(parent.atom_count)
    )
    return rel, Homomorphism(parent, rel, images)


def generated_subalgebra(gens: Iterable[Element], algebra: FiniteBooleanAlgebra | None = None) -> Subalgebra:
    """Smallest subalgebra containing ``gens``: atoms grouped by membership pattern."""
    gens = list(gens)
    if algebra is None:
        if not gens:
            raise BooltypeError("cannot infer the algebra of an empty generator set")
        algebra = gens[0].algebra
    _same(algebra, *gens)
    cells: dict[tuple[bool, ...], int] = {}
    for i in range(algebra.atom_count):
        key = tuple(bool(g.mask >> i & 1) for g in gens)
        cells[key] = cells.get(key, 0) | (1 << i)
    return Subalgebra(algebra, tuple(cells.values()))


def is_antichain(xs: Iterable[Element]) -> bool:
    xs = list(xs)
    seen = 0
    for e in xs:
        if e.is_zero or e.mask & seen:
            return False
        seen |= e.mask
    if xs:
        _same(xs[0].algebra, *xs)
    return True


def sign_products(xs: Sequence[Element]) -> Iterator[tuple[tuple[int, ...], Element]]:
    """Yield every full sign pattern over ``xs`` with its signed product."""
    if not xs:
        return
    algebra = xs[0].algebra
    for signs in itertools.product((1, -1), repeat=len(xs)):
        mask = algebra.full_mask
        for s, e in zip(signs, xs):
            mask &= e.mask if s == 1 else ~e.mask
        yield signs, Element(algebra, mask & algebra.full_mask)


def is_independent(xs: Iterable[Element]) -> bool:
    """Every signed product of the (distinct) members is nonzero."""
    xs = sorted(set(xs), key=lambda e: e.mask)
    if not xs:
        return True
    _same(xs[0].algebra, *xs)
    guards.check("sikorski", len(xs), "independence test size")
    # each partial signed product dominates some full one
    return all(not prod.is_zero for _, prod in sign_products(xs))


@dataclass(frozen=True)
class SikorskiResult:
    extendable: bool
    witness: Homomorphism | None = None
    violation: tuple[tuple[Element, int], ...] | None = None

    def __bool__(self) -> bool:
        return self.extendable


def sikorski_extendable(
    f: Mapping[Element, Element],
    domain: FiniteBooleanAlgebra | None = None,
    codomain: FiniteBooleanAlgebra | None = None,
) -> SikorskiResult:
    """Decide whether a partial map extends to a homomorphism.

    The criterion is: every sign pattern whose product vanishes in the domain
    also vanishes on the images.  A sign pattern survives in the codomain
    exactly when it is the pattern of some codomain atom, and survives in the
    domain when it is the pattern of some domain atom, so the check runs over
    atoms instead of all ``2**len(f)`` patterns.

    The witness sends each codomain atom to the lowest-indexed domain atom
    carrying the same pattern.
    """
    keys = sorted(f, key=lambda e: e.mask)
    if domain is None:
        if not keys:
            raise BooltypeError("domain algebra required for an empty partial map")
        domain = keys[0].algebra
    if codomain is None:
        if not keys:
            raise BooltypeError("codomain algebra required for an empty partial map")
        codomain = f[keys[0]].algebra
    _same(domain, *keys)
    _same(codomain, *(f[k] for k in keys))
    guards.check("sikorski", len(keys), "partial map size")

    first_atom: dict[tuple[bool, ...], int] = {}
    for i in range(domain.atom_count):
        pattern = tuple(bool(k.mask >> i & 1) for k in keys)
        first_atom.setdefault(pattern, i)

    images = [0] * domain.atom_count
    for j in range(codomain.atom_count):
        pattern = tuple(bool(f[k].mask >> j & 1) for k in keys)
        i = first_atom.get(pattern)
        if i is None:
            violation = tuple((k, 1 if bit else -1) for k, bit in zip(keys, pattern))
            return SikorskiResult(False, violation=violation)
        images[i] |= 1 << j
    witness = Homomorphism(domain, codomain, tuple(Element(codomain, m) for m in images))
    assert all(witness(k) == f[k] for k in keys)
    return SikorskiResult(True, witness=witness)


@dataclass(frozen=True)
class OnePointExtension:
    """Bounds for extending ``h`` to the subalgebra generated by ``h``'s domain and ``a``."""

    h: Homomorphism
    a: Element
    lo: Element
    hi: Element

    @property
    def domain(self) -> Subalgebra:
        algebra, blocks = _domain_parts(self.h.domain)
        split = []
        for b in blocks:
            for part in (b & self.a.mask, b & ~self.a.mask):
                if part:
                    split.append(part)
        return Subalgebra(algebra, tuple(split))

    def admits(self, b: Element) -> bool:
        return self.lo <= b and b <= self.hi

    def extend_with(self, b: Element) -> Homomorphism:
        _same(self.h.codomain, b)
        if not self.lo <= b:
            raise OutOfInterval(f"value {b} is not above the lower bound {self.lo}")
        if not b <= self.hi:
            raise OutOfInterval(f"value {b} is not below the upper bound {self.hi}")
        algebra, blocks = _domain_parts(self.h.domain)
        target = self.domain
        images = {}
        for blk, img in zip(blocks, self.h.atom_images):
            inside, outside = blk & self.a.mask, blk & ~self.a.mask
            if inside and outside:
                images[inside] = img & b
                images[outside] = img - b
            else:
                images[blk] = img
        g = Homomorphism(target, self.h.codomain, tuple(images[blk] for blk in target.blocks))
        assert g(self.a) == b
        return g


def one_point_extension_interval(h: Homomorphism, a: Element) -> OnePointExtension:
    algebra, blocks = _domain_parts(h.domain)
    _same(algebra, a)
    lo = 0
    hi = 0
    for blk, img in zip(blocks, h.atom_images):
        if blk & a.mask == blk:
            lo |= img.mask
        if blk & a.mask:
            hi |= img.mask
    return OnePointExtension(h, a, Element(h.codomain, lo), Element(h.codomain, hi))


def _weighted_blocks(x, measure: MeasureAlgebra | None):
    if isinstance(x, MeasureAlgebra):
        measure = measure or x
        x = x.algebra
    algebra, blocks = _domain_parts(x)
    weights = None
    if measure is not None:
        if measure.algebra is not algebra:
            raise AlgebraMismatch("measure is defined on a different algebra")
        weights = [measure.measure(Element(algebra, b)) for b in blocks]
    return x, algebra, blocks, weights


def subalgebra_isomorphisms(
    a1,
    a2,
    measure_preserving: bool = False,
    measure1: MeasureAlgebra | None = None,
    measure2: MeasureAlgebra | None = None,
) -> list[Homomorphism]:
    """All isomorphisms from ``a1`` onto ``a2`` as maps into ``a2``'s algebra.

    With ``measure_preserving`` only bijections matching blocks of equal
    measure are returned; the measures come from ``MeasureAlgebra`` inputs or
    the explicit ``measure1``/``measure2`` arguments.
    """
    d1, alg1, blocks1, w1 = _weighted_blocks(a1, measure1)
    _, alg2, blocks2, w2 = _weighted_blocks(a2, measure2)
    if measure_preserving and (w1 is None or w2 is None):
        raise BooltypeError("measure-preserving isomorphisms need measures on both sides")
    if len(blocks1) != len(blocks2):
        return []
    guards.check("isomorphism", len(blocks1), "isomorphism search blocks")
    out = []
    for perm in itertools.permutations(range(len(blocks2))):
        if measure_preserving and any(w1[i] != w2[j] for i, j in enumerate(perm)):
            continue
        out.append(Homomorphism(d1, alg2, tuple(Element(alg2, blocks2[j]) for j in perm)))
    return out


def automorphisms(algebra: FiniteBooleanAlgebra, measure: MeasureAlgebra | None = None) -> list[Homomorphism]:
    if measure is not None:
        return subalgebra_isomorphisms(measure, measure, measure_preserving=True)
    return subalgebra_isomorphisms(algebra, algebra)


def all_homomorphisms(domain, codomain: FiniteBooleanAlgebra) -> Iterator[Homomorphism]:
    """Every homomorphism: each codomain atom picks the domain atom it lies under."""
    _, blocks = _domain_parts(domain)
    n = len(blocks)
    for choice in itertools.product(range(n), repeat=codomain.atom_count):
        images = [0] * n
        for j, i in enumerate(choice):
            images[i] |= 1 << j
        yield Homomorphism(domain, codomain, tuple(Element(codomain, m) for m in images))


def count_homomorphisms(domain, codomain: FiniteBooleanAlgebra) -> int:
    return len(_domain_parts(domain)[1]) ** codomain.atom_count


def powerset_algebra(coordinates: int, name: str | None = None) -> FiniteBooleanAlgebra:
    """The algebra ``2**coordinates`` with atoms labelled by coordinate index."""
    return FiniteBooleanAlgebra(coordinates, name=name)


def measure_algebra(weights: Sequence, name: str | None = None, labels=None) -> MeasureAlgebra:
    return MeasureAlgebra(FiniteBooleanAlgebra(len(weights), labels=labels, name=name), tuple(weights))
