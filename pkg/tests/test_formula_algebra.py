import itertools

import numpy as np
import pytest

from booltype import guards
from booltype.algebra import Subalgebra
from booltype.corpus import chain, cycle, pure_equality, random_graph
from booltype.definable import (
    build_formula_algebra,
    closure_partition,
    dual_vc,
    instance_elements,
    orbit_partition,
    phi_restricted_algebra,
    primal_vc,
    split,
)
from booltype.errors import GuardExceeded, NotDefinable
from booltype.formula import evaluate

from helpers import GRAPH_SEED, brute_automorphisms, brute_dual_vc, brute_orbits, corpus, subsets


def _binary_formula(s) -> str:
    if not s.relations:
        return "x0 = y0"
    sym = s.relations[0].symbol
    return f"{sym}(x0, y0)" if sym.isalnum() else f"x0 {sym} y0"


def test_atom_count_examples():
    eq3 = pure_equality(3)
    assert build_formula_algebra(eq3, 1).atom_count == 1
    fa = build_formula_algebra(eq3, 1, (0,))
    assert [fa.tuples(a) for a in fa.atoms()] == [[(0,)], [(1,), (2,)]]
    assert build_formula_algebra(chain(3), 1).atom_count == 3


@pytest.mark.parametrize("s,count", [(pure_equality(3), 6), (chain(3), 1), (cycle(4), 8)])
def test_automorphism_group_sizes(s, count):
    assert len(s.automorphisms.elements) == count == len(brute_automorphisms(s))


@pytest.mark.parametrize("s", corpus(), ids=lambda s: s.name)
def test_orbits_match_brute_force(s):
    for k in (1, 2):
        for params in subsets(s.universe_size, 2):
            fa = build_formula_algebra(s, k, params)
            assert set(orbit_partition(fa)) == brute_orbits(s, k, params)


@pytest.mark.parametrize("s", corpus(), ids=lambda s: s.name)
def test_witness_formulas_define_their_atoms(s):
    for k, params in [(1, ()), (1, (0,)), (2, ()), (2, (1,))]:
        fa = build_formula_algebra(s, k, params)
        for i in range(fa.atom_count):
            assert sorted(evaluate(fa.witness(i), s, k)) == fa.tuples(fa.atom(i))


@pytest.mark.parametrize("s", corpus(), ids=lambda s: s.name)
def test_atoms_are_invariant_under_the_stabilizer(s):
    for params in [(), (0,), (0, 1)]:
        fa = build_formula_algebra(s, 2, params)
        for g in s.automorphisms.stabilizer(params):
            for i in range(fa.atom_count):
                moved = sorted(tuple(g[v] for v in t) for t in fa.tuples(fa.atom(i)))
                assert moved == fa.tuples(fa.atom(i))


def test_non_invariant_set_is_rejected():
    fa = build_formula_algebra(pure_equality(3), 1)
    with pytest.raises(NotDefinable):
        fa.element_from_tuples([(0,)])


def test_phi_restricted_examples():
    s = pure_equality(3)
    fa = build_formula_algebra(s, 1, (0, 1, 2))
    assert phi_restricted_algebra(fa, split("x0 = y0", 1, s)).blocks == Subalgebra.whole(fa.algebra).blocks
    closed = phi_restricted_algebra(build_formula_algebra(s, 1), split("E y . x0 = y", 1, s))
    assert closed.block_count == 1
    c4 = chain(4)
    fa = build_formula_algebra(c4, 1, range(4))
    assert phi_restricted_algebra(fa, split("x0 < y0", 1, c4)).block_count == 4


@pytest.mark.parametrize("s", corpus(), ids=lambda s: s.name)
def test_phi_restricted_is_coarser(s):
    phi = split(_binary_formula(s), 1, s)
    for params in subsets(s.universe_size, 2):
        fa = build_formula_algebra(s, 1, params)
        sub = phi_restricted_algebra(fa, phi)
        assert Subalgebra.whole(fa.algebra).refines(sub)
        for _, e in instance_elements(fa, phi):
            assert sub.contains(e)


def test_dual_vc_examples():
    for m in (2, 3, 5):
        s = pure_equality(m)
        assert dual_vc(s, split("x0 = y0", 1, s)).dimension == 1
    c5 = chain(5)
    assert dual_vc(c5, split("x0 < y0", 1, c5)).dimension == 1
    g = random_graph(5, GRAPH_SEED)
    rep = dual_vc(g, split("R(x0, y0)", 1, g))
    assert rep.dimension >= 2
    # the witness really is shattered
    table = split("R(x0, y0)", 1, g).table(g)
    pts = [w[0] for w in rep.witness]
    assert len({tuple(bool(table[x, p]) for p in pts) for x in range(5)}) == 2 ** len(pts)


@pytest.mark.parametrize("s", corpus(), ids=lambda s: s.name)
def test_vc_matches_brute_force(s):
    phi = split(_binary_formula(s), 1, s)
    table = phi.table(s)
    assert dual_vc(s, phi).dimension == brute_dual_vc(s, lambda x, b: bool(table[x, b]))
    assert primal_vc(s, phi).dimension == brute_dual_vc(s, lambda b, x: bool(table[x, b]))


@pytest.mark.parametrize("s", corpus()[:6], ids=lambda s: s.name)
def test_closure_oracle_matches_orbits(s):
    for k in (1, 2):
        for params in subsets(s.universe_size, 1):
            fa = build_formula_algebra(s, k, params)
            assert closure_partition(s, k, params) == orbit_partition(fa)


def test_tuple_guard():
    with guards.overridden(tuples=10):
        with pytest.raises(GuardExceeded):
            build_formula_algebra(chain(4), 2, (3,))


def test_atoms_partition_all_tuples():
    s = cycle(5)
    fa = build_formula_algebra(s, 2, (0,))
    all_t = sorted(itertools.product(range(5), repeat=2))
    assert fa.tuples(fa.algebra.one) == all_t
    arr = np.zeros((5, 5), dtype=bool)
    arr[0, 0] = True
    assert fa.element_from_array(arr).atoms == (fa.atom_of((0, 0)),)
