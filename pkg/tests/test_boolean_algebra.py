import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from booltype.algebra import (
    Element,
    FiniteBooleanAlgebra,
    Homomorphism,
    MeasureAlgebra,
    Subalgebra,
    all_homomorphisms,
    automorphisms,
    count_homomorphisms,
    eval_lattice,
    generated_subalgebra,
    is_antichain,
    is_independent,
    measure_algebra,
    one_point_extension_interval,
    relative_algebra,
    sign_products,
    sikorski_extendable,
    subalgebra_isomorphisms,
)
from booltype.errors import AlgebraMismatch, BooltypeError, InvalidHomomorphism, InvalidMeasure, OutOfInterval

from helpers import all_elements, as_set, brute_closure, brute_homomorphisms, brute_independent


@st.composite
def algebra_and_masks(draw, max_atoms=6, count=2):
    n = draw(st.integers(1, max_atoms))
    b = FiniteBooleanAlgebra(n)
    masks = [draw(st.integers(0, b.full_mask)) for _ in range(count)]
    return b, [b.from_mask(m) for m in masks]


@st.composite
def homomorphisms(draw, max_dom=5, max_cod=4):
    n = draw(st.integers(1, max_dom))
    c = draw(st.integers(1, max_cod))
    dom, cod = FiniteBooleanAlgebra(n), FiniteBooleanAlgebra(c)
    owner = [draw(st.integers(0, n - 1)) for _ in range(c)]
    images = [cod.element(j for j in range(c) if owner[j] == i) for i in range(n)]
    return Homomorphism(dom, cod, tuple(images))


def test_lattice_examples():
    b = FiniteBooleanAlgebra(4)
    assert b.parse_element("{0,1}") & b.parse_element("{1,2}") == b.element([1])
    assert ~b.parse_element("{0,1}") == b.element([2, 3])
    assert all(x <= b.one for x in b.elements())
    assert eval_lattice("meet", b.element([0, 1]), b.element([1, 2])) == b.element([1])
    assert eval_lattice("leq", b.element([1]), b.element([1, 2])) is True


def test_labels_parse_and_print():
    b = FiniteBooleanAlgebra(3, labels=("a", "b", "c"))
    e = b.parse_element("{a,c}")
    assert e.atoms == (0, 2)
    assert repr(e) == "{a,c}"
    with pytest.raises(BooltypeError):
        b.parse_element("{z}")


def test_mixing_algebras_is_an_error():
    a, b = FiniteBooleanAlgebra(2), FiniteBooleanAlgebra(2)
    with pytest.raises(AlgebraMismatch):
        a.one & b.one


@given(algebra_and_masks(count=3))
def test_boolean_laws(data):
    b, (x, y, z) = data
    assert x & (y | z) == (x & y) | (x & z)
    assert ~(x & y) == ~x | ~y
    assert x | ~x == b.one and (x & ~x).is_zero
    assert (x <= y) == ((x & y) == x)


def test_relative_algebra_examples():
    b = FiniteBooleanAlgebra(4)
    rel, proj = relative_algebra(b.element([1, 3]))
    assert rel.atom_count == 2
    assert rel.to_parent(proj(b.element([0, 1]))) == b.element([1])
    rel1, proj1 = relative_algebra(b.one)
    assert all(rel1.to_parent(proj1(e)) == e for e in b.elements())


@given(algebra_and_masks(count=1))
def test_relative_projection_stays_below(data):
    b, (unit,) = data
    if unit.is_zero:
        return
    rel, proj = relative_algebra(unit)
    for e in b.elements():
        assert rel.to_parent(proj(e)) == e & unit


def test_generated_subalgebra_examples():
    b = FiniteBooleanAlgebra(4)
    assert generated_subalgebra([], b).blocks == (b.full_mask,)
    assert generated_subalgebra(b.atoms(), b).block_count == 4
    assert sorted(generated_subalgebra([b.element([0, 1])], b).blocks) == [0b0011, 0b1100]


@given(algebra_and_masks(count=3))
def test_generated_subalgebra_matches_closure(data):
    b, gens = data
    sub = generated_subalgebra(gens, b)
    assert {as_set(e) for e in sub.elements()} == brute_closure(b.atom_count, [as_set(g) for g in gens])


def test_antichain_and_independence_examples():
    b = FiniteBooleanAlgebra(4)
    assert is_antichain(b.atoms())
    a = b.element([0, 1])
    assert not is_independent([a, ~a])
    k = 3
    cube = FiniteBooleanAlgebra(2 ** k)
    coords = [cube.element(s for s in range(2 ** k) if s >> i & 1) for i in range(k)]
    assert is_independent(coords)
    assert all(len(e) == 1 for _, e in sign_products(coords))


@given(algebra_and_masks(max_atoms=5, count=3))
def test_independence_matches_sign_enumeration(data):
    b, xs = data
    # independence is a property of the set, so repeated members count once
    distinct = list(dict.fromkeys(as_set(x) for x in xs))
    assert is_independent(xs) == brute_independent(distinct, b.atom_count)


@given(st.integers(1, 6), st.data())
def test_antichains_are_bounded_by_atom_count(n, data):
    b = FiniteBooleanAlgebra(n)
    xs = data.draw(st.lists(st.integers(1, b.full_mask), max_size=n + 2, unique=True))
    if is_antichain([b.from_mask(m) for m in xs]):
        assert len(xs) <= n


@given(homomorphisms())
def test_homomorphism_laws(h):
    dom = h.domain_algebra
    assert h(dom.zero).is_zero and h(dom.one).is_one
    for x in dom.elements():
        assert h(~x) == ~h(x)
        for y in dom.elements():
            assert h(x & y) == h(x) & h(y)


def test_invalid_homomorphism_rejected():
    dom, cod = FiniteBooleanAlgebra(2), FiniteBooleanAlgebra(2)
    with pytest.raises(InvalidHomomorphism):
        Homomorphism(dom, cod, (cod.element([0]), cod.element([0, 1])))
    with pytest.raises(InvalidHomomorphism):
        Homomorphism(dom, cod, (cod.element([0]), cod.zero))


def test_sikorski_examples():
    a, b = FiniteBooleanAlgebra(2), FiniteBooleanAlgebra(2)
    res = sikorski_extendable({a.zero: b.zero, a.one: b.one}, a, b)
    assert res.extendable
    x = a.atom(0)
    res = sikorski_extendable({x: b.zero}, a, b)
    assert res.extendable and res.witness(~x) == b.one
    res = sikorski_extendable({x: b.one, ~x: b.atom(0)}, a, b)
    assert not res.extendable
    assert {e for e, _ in res.violation} == {x, ~x}


@st.composite
def partial_maps(draw):
    n = draw(st.integers(1, 4))
    c = draw(st.integers(1, 4))
    dom, cod = FiniteBooleanAlgebra(n), FiniteBooleanAlgebra(c)
    keys = draw(st.lists(st.integers(0, dom.full_mask), max_size=4, unique=True))
    return dom, cod, {dom.from_mask(k): cod.from_mask(draw(st.integers(0, cod.full_mask))) for k in keys}


@settings(max_examples=150)
@given(partial_maps())
def test_sikorski_matches_brute_force(data):
    dom, cod, f = data
    exists = any(all(h[as_set(k)] == as_set(v) for k, v in f.items())
                 for h in brute_homomorphisms(dom.atom_count, cod.atom_count))
    res = sikorski_extendable(f, dom, cod)
    assert res.extendable == exists
    if exists:
        assert all(res.witness(k) == v for k, v in f.items())


@settings(max_examples=80)
@given(partial_maps(), st.data())
def test_one_point_interval_is_exactly_achievable(data, draw):
    dom, cod, f = data
    res = sikorski_extendable(f, dom, cod)
    if not res.extendable:
        return
    sub = generated_subalgebra(list(f), dom)
    h = Homomorphism(sub, cod, tuple(res.witness(Element(dom, blk)) for blk in sub.blocks))
    a = dom.from_mask(draw.draw(st.integers(0, dom.full_mask)))
    ext = one_point_extension_interval(h, a)
    achievable = {g(a) for g in all_homomorphisms(dom, cod) if g.extends(h)}
    for b in cod.elements():
        assert (b in achievable) == ext.admits(b)
        if ext.admits(b):
            assert ext.extend_with(b)(a) == b
        else:
            with pytest.raises(OutOfInterval):
                ext.extend_with(b)


def test_one_point_interval_examples():
    dom, cod = FiniteBooleanAlgebra(3), FiniteBooleanAlgebra(2)
    trivial = Homomorphism(Subalgebra.trivial(dom), cod, (cod.one,))
    ext = one_point_extension_interval(trivial, dom.element([0]))
    assert ext.lo.is_zero and ext.hi.is_one
    h = next(all_homomorphisms(dom, cod))
    ext = one_point_extension_interval(h, dom.element([1]))
    assert ext.lo == ext.hi == h(dom.element([1]))


def test_isomorphism_examples():
    a = FiniteBooleanAlgebra(2)
    assert len(subalgebra_isomorphisms(a, a)) == 2
    m1 = measure_algebra([Fraction(1, 3), Fraction(2, 3)])
    m2 = measure_algebra([Fraction(1, 3), Fraction(2, 3)])
    assert len(subalgebra_isomorphisms(m1, m2, measure_preserving=True)) == 1
    assert subalgebra_isomorphisms(a, FiniteBooleanAlgebra(3)) == []


@given(st.lists(st.sampled_from([Fraction(1, 6), Fraction(1, 3)]), min_size=1, max_size=5))
def test_measure_preserving_automorphisms_count(weights):
    total = sum(weights)
    weights = [w / total for w in weights]
    ma = measure_algebra(weights)
    expected = 1
    for w in set(weights):
        for i in range(1, weights.count(w) + 1):
            expected *= i
    assert len(automorphisms(ma.algebra, ma)) == expected


def test_measure_algebra_validation():
    with pytest.raises(InvalidMeasure):
        measure_algebra([Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(InvalidMeasure):
        measure_algebra([1, 0])
    with pytest.raises(InvalidMeasure):
        MeasureAlgebra(FiniteBooleanAlgebra(2), (0.5, 0.5))


@pytest.mark.parametrize("n,c", [(1, 1), (2, 3), (3, 2), (4, 2)])
def test_homomorphism_enumeration_matches_brute_force(n, c):
    dom, cod = FiniteBooleanAlgebra(n), FiniteBooleanAlgebra(c)
    mine = {tuple(as_set(img) for img in h.atom_images) for h in all_homomorphisms(dom, cod)}
    brute = {tuple(h[frozenset([i])] for i in range(n)) for h in brute_homomorphisms(n, c)}
    assert mine == brute
    assert count_homomorphisms(dom, cod) == len(brute) == n ** c


def test_all_elements_helper_agrees():
    b = FiniteBooleanAlgebra(3)
    assert {as_set(e) for e in b.elements()} == set(all_elements(3))
    assert len(list(itertools.islice(b.elements(), 100))) == 8
