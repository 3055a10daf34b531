"""Keisler measures on formula algebras, with exact rational weights."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import guards
from .algebra import Element, FiniteBooleanAlgebra, MeasureAlgebra, automorphisms, subalgebra_isomorphisms
from .boolean_types import (
    BooleanType, CompleteType, count_extensions, elementary_permutations, fine_atoms, is_smooth_within,
    non_conjugate_extensions, push_forward, supersets,
)
from .definable import FormulaAlgebra, SplitFormula, build_formula_algebra, instance_elements
from .errors import BooltypeError, InvalidMeasure, OutOfInterval
from .formula import Formula, parameters, parse


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction or ``p/q`` string; floats are rejected."""
    if isinstance(value, bool):
        raise InvalidMeasure(f"not a rational weight: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise InvalidMeasure(f"weights must be written as p/q, got {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InvalidMeasure(f"not a rational weight: {value!r}") from None
    raise InvalidMeasure(f"weights must be exact rationals, got {type(value).__name__} {value!r}")


@dataclass(frozen=True)
class KeislerMeasure:
    domain: FormulaAlgebra
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        weights = tuple(as_fraction(w) for w in self.weights)
        if len(weights) != self.domain.atom_count:
            raise InvalidMeasure(f"expected {self.domain.atom_count} atom weights, got {len(weights)}")
        neg = [i for i, w in enumerate(weights) if w < 0]
        if neg:
            raise InvalidMeasure(f"atom {neg[0]} has negative weight {weights[neg[0]]}")
        if sum(weights) != 1:
            raise InvalidMeasure(f"weights sum to {sum(weights)}, not 1")
        object.__setattr__(self, "weights", weights)

    def __call__(self, e: Element) -> Fraction:
        if e.algebra is not self.domain.algebra:
            raise BooltypeError("element is not in the measure's domain")
        return sum((self.weights[i] for i in e.atoms), Fraction(0))

    def of(self, f: Formula | str) -> Fraction:
        return self(self.domain.element(f))

    @property
    def params(self) -> tuple[int, ...]:
        return self.domain.params


def measure_from_weights(fa: FormulaAlgebra, weights: Sequence) -> KeislerMeasure:
    return KeislerMeasure(fa, tuple(as_fraction(w) for w in weights))


def measure_of(lam: KeislerMeasure, f: Formula | str | Element) -> Fraction:
    if isinstance(f, Element):
        return lam(f)
    return lam.of(f)


def point_mass(fa: FormulaAlgebra, atom: int) -> KeislerMeasure:
    return KeislerMeasure(fa, tuple(Fraction(int(i == atom)) for i in range(fa.atom_count)))


def uniform_measure(fa: FormulaAlgebra) -> KeislerMeasure:
    n = fa.atom_count
    return KeislerMeasure(fa, (Fraction(1, n),) * n)


# --- measures and Boolean types -------------------------------------------------

@dataclass(frozen=True)
class MeasureTypePair:
    """The quotient measure algebra of a measure and the projection type into it."""

    quotient: MeasureAlgebra
    canonical_type: BooleanType


def to_boolean_type(lam: KeislerMeasure) -> MeasureTypePair:
    """Quotient by the null atoms; the projection composed with the quotient measure is ``lam``."""
    nonnull = [i for i, w in enumerate(lam.weights) if w > 0]
    algebra = FiniteBooleanAlgebra(len(nonnull), labels=tuple(f"a{i}" for i in nonnull), name="quotient")
    quotient = MeasureAlgebra(algebra, tuple(lam.weights[i] for i in nonnull))
    pos = {a: j for j, a in enumerate(nonnull)}
    images = tuple(algebra.atom(pos[i]) if i in pos else algebra.zero for i in range(lam.domain.atom_count))
    pair = MeasureTypePair(quotient, BooleanType(lam.domain, algebra, images))
    assert from_boolean_type(pair.canonical_type, quotient) == lam
    return pair


def from_boolean_type(p: BooleanType, nu: MeasureAlgebra) -> KeislerMeasure:
    """``nu o p``."""
    if nu.algebra is not p.codomain:
        raise BooltypeError("the measure lives on a different algebra than the type's codomain")
    return KeislerMeasure(p.domain, tuple(nu.measure(img) for img in p.atom_images))


def decompose_measure(lam: KeislerMeasure) -> list[tuple[Fraction, CompleteType]]:
    """``lam = sum of alpha_i * p_i`` over the nonnull atoms."""
    return [(w, CompleteType(lam.domain, i)) for i, w in enumerate(lam.weights) if w > 0]


def average_of_types(ps: Sequence[CompleteType], f: Formula | str | Element) -> Fraction:
    """Fraction of the listed complete types containing ``f``."""
    if not ps:
        raise BooltypeError("cannot average an empty family")
    fa = ps[0].domain
    e = f if isinstance(f, Element) else fa.element(f)
    return Fraction(sum(1 for p in ps if p.contains(e)), len(ps))


def _round(weights: Sequence[Fraction], n: int) -> list[int]:
    """Largest-remainder rounding of ``n * weights`` to integers summing to ``n``."""
    scaled = [w * n for w in weights]
    counts = [int(s) for s in scaled]
    short = n - sum(counts)
    order = sorted(range(len(weights)), key=lambda i: (-(scaled[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def approximation_error(lam: KeislerMeasure, ps: Sequence[CompleteType], phi: SplitFormula) -> Fraction:
    """Largest ``|lam(phi(x, b)) - Av(ps; phi(x, b))|`` over parameter tuples ``b``."""
    worst = Fraction(0)
    for _, e in instance_elements(lam.domain, phi):
        worst = max(worst, abs(lam(e) - average_of_types(ps, e)))
    return worst


def approximate_by_types(lam: KeislerMeasure, phi: SplitFormula, m: int) -> list[CompleteType]:
    """Complete types whose averages are within ``1/m`` of ``lam`` on every instance of ``phi``.

    Tries family sizes ``n = 1, 2, ...`` with multiplicities from rounding the
    weights; ``n = m * (support size)`` always works since each atom is off by
    less than ``1/n``.
    """
    if m < 1:
        raise BooltypeError("precision must be a positive integer")
    support = sum(1 for w in lam.weights if w > 0)
    bound = m * support
    guards.check("tuples", bound, "approximation family size")
    for n in range(1, bound + 1):
        counts = _round(lam.weights, n)
        ps = [CompleteType(lam.domain, i) for i, c in enumerate(counts) for _ in range(c)]
        if approximation_error(lam, ps, phi) < Fraction(1, m):
            return ps
    raise AssertionError("rounding with m * support types must succeed")


# --- extensions to larger parameter sets ------------------------------------------

def _instance(lam: KeislerMeasure, phi: Formula | str, params: Iterable[int] | None):
    s = lam.domain.structure
    if isinstance(phi, str):
        phi = parse(phi, s)
    b = set(lam.params) | parameters(phi) | set(params or ())
    fine = build_formula_algebra(s, lam.domain.k, b)
    return fine, fine.element(phi)


@dataclass(frozen=True)
class ExtensionInterval:
    lo: Fraction
    hi: Fraction
    params: tuple[int, ...]


def interval_of_element(lam: KeislerMeasure, inst: Element, fine: FormulaAlgebra) -> ExtensionInterval:
    """``lo`` is the weight of the atoms inside ``inst``, ``hi`` of those meeting it."""
    parts = fine_atoms(lam.domain, fine)
    lo = hi = Fraction(0)
    for a, w in enumerate(lam.weights):
        inside = [f for f in parts[a] if inst.mask >> f & 1]
        if len(inside) == len(parts[a]):
            lo += w
        if inside:
            hi += w
    return ExtensionInterval(lo, hi, fine.params)


def extension_interval(lam: KeislerMeasure, phi: Formula | str, params: Iterable[int] | None = None) -> ExtensionInterval:
    """Values an extension of ``lam`` to the parameters of ``phi`` can give ``phi``."""
    fine, inst = _instance(lam, phi, params)
    return interval_of_element(lam, inst, fine)


def restrict_measure(mu: KeislerMeasure, coarse: FormulaAlgebra) -> KeislerMeasure:
    parts = fine_atoms(coarse, mu.domain)
    return KeislerMeasure(coarse, tuple(sum((mu.weights[f] for f in fs), Fraction(0)) for fs in parts))


def extend_element_with_value(lam: KeislerMeasure, inst: Element, fine: FormulaAlgebra, r) -> KeislerMeasure:
    """An extension of ``lam`` to ``fine`` giving ``inst`` the value ``r``.

    Atoms split by ``inst`` are filled in order: as much weight as still
    needed goes to the first finer atom inside, the remainder to the first
    one outside.
    """
    r = as_fraction(r)
    interval = interval_of_element(lam, inst, fine)
    if r < interval.lo:
        raise OutOfInterval(f"value {r} is below the lower bound {interval.lo}")
    if r > interval.hi:
        raise OutOfInterval(f"value {r} is above the upper bound {interval.hi}")
    parts = fine_atoms(lam.domain, fine)
    weights = [Fraction(0)] * fine.atom_count
    need = r - interval.lo
    for a, w in enumerate(lam.weights):
        inside = [f for f in parts[a] if inst.mask >> f & 1]
        outside = [f for f in parts[a] if not inst.mask >> f & 1]
        if inside and outside:
            put = min(need, w)
            need -= put
            weights[inside[0]] += put
            weights[outside[0]] += w - put
        else:
            weights[parts[a][0]] += w
    mu = KeislerMeasure(fine, tuple(weights))
    assert mu(inst) == r and restrict_measure(mu, lam.domain) == lam
    return mu


def extend_with_value(lam: KeislerMeasure, phi: Formula | str, r, params: Iterable[int] | None = None) -> KeislerMeasure:
    fine, inst = _instance(lam, phi, params)
    return extend_element_with_value(lam, inst, fine, r)


def measure_smoothness_failure(lam: KeislerMeasure) -> tuple[tuple[int, ...], int] | None:
    """First (superset, finer atom) whose extension interval is not a single point.

    Every formula over a superset is a union of finer atoms, so checking the
    atoms suffices.
    """
    s = lam.domain.structure
    for b in supersets(lam.params, lam.domain.m):
        fine = build_formula_algebra(s, lam.domain.k, b)
        for f in range(fine.atom_count):
            iv = interval_of_element(lam, fine.atom(f), fine)
            if iv.lo != iv.hi:
                return b, f
    return None


def is_smooth_measure_within(lam: KeislerMeasure) -> bool:
    """Every formula over every parameter superset has a forced value."""
    return measure_smoothness_failure(lam) is None


# --- transfer between measures and their canonical types ------------------------

@dataclass(frozen=True)
class TransferReport:
    measure_smooth: bool
    type_smooth: bool
    # no measure-preserving automorphism of the quotient besides the identity,
    # or the type is smooth: the non-conjugacy half has nothing to test
    vacuous: bool
    # for non-smooth types: the two extensions are not conjugate by any
    # measure-preserving automorphism and induce different measures
    pair_separated: bool | None

    @property
    def agrees(self) -> bool:
        return self.measure_smooth == self.type_smooth and self.pair_separated is not False


def smoothness_transfer(lam: KeislerMeasure) -> TransferReport:
    pair = to_boolean_type(lam)
    p, nu = pair.canonical_type, pair.quotient
    measure_smooth = is_smooth_measure_within(lam)
    type_smooth = is_smooth_within(p)
    preserving = automorphisms(nu.algebra, nu)
    vacuous = type_smooth or len(preserving) < 2
    separated = None
    if not type_smooth:
        ext = non_conjugate_extensions(p)
        conj = any(ext.q1.compose(s) == ext.q2 for s in preserving)
        separated = not conj and from_boolean_type(ext.q1, nu) != from_boolean_type(ext.q2, nu)
    return TransferReport(measure_smooth, type_smooth, vacuous, separated)


def canonical_type_extensions(lam: KeislerMeasure, fine: FormulaAlgebra) -> int:
    return count_extensions(to_boolean_type(lam).canonical_type, fine)


# --- conjugacy -------------------------------------------------------------------

def push_forward_measure(lam: KeislerMeasure, perm: Sequence[int]) -> KeislerMeasure:
    weights = [Fraction(0)] * len(perm)
    for a, b in enumerate(perm):
        weights[b] = lam.weights[a]
    return KeislerMeasure(lam.domain, tuple(weights))


def measure_conjugacy(lam1: KeislerMeasure, lam2: KeislerMeasure) -> tuple[int, ...] | None:
    """An elementary atom permutation ``pi`` with ``pi * lam1 = lam2``, if any."""
    if lam1.domain is not lam2.domain:
        return None
    for perm in elementary_permutations(lam1.domain):
        if push_forward_measure(lam1, perm) == lam2:
            return perm
    return None


def canonical_types_conjugate(lam1: KeislerMeasure, lam2: KeislerMeasure) -> tuple[int, ...] | None:
    """``pi`` such that some measure-preserving isomorphism of quotients carries ``pi * p2`` to ``p1``."""
    if lam1.domain is not lam2.domain:
        return None
    pair1, pair2 = to_boolean_type(lam1), to_boolean_type(lam2)
    isos = subalgebra_isomorphisms(pair2.quotient, pair1.quotient, measure_preserving=True)
    for perm in elementary_permutations(lam1.domain):
        moved = push_forward(pair2.canonical_type, perm)
        for sigma in isos:
            if moved.compose(sigma) == pair1.canonical_type:
                return perm
    return None
