"""The twelve acceptance criteria, each checked against an independent oracle.

Every test prints one ``criterion N: PASS|FAIL`` line (visible with ``-v`` or
``-s``) before asserting, so a run's log doubles as the acceptance report.
"""

import contextlib
import itertools
import random
from fractions import Fraction

from booltype.algebra import (
    Element,
    FiniteBooleanAlgebra,
    Homomorphism,
    Subalgebra,
    all_homomorphisms,
    generated_subalgebra,
    join,
    one_point_extension_interval,
    sikorski_extendable,
)
from booltype.boolean_types import (
    blocking_atoms,
    chain_interval_images,
    classify,
    construct_surjective_type,
    decompose,
    enumerate_types,
    extensions,
    fingerprint,
    fingerprint_conjugate,
    instance_values,
    is_realized,
    is_smooth_within,
    realized_sum,
    recompose,
    restricted_image,
    supersets,
)
from booltype.corpus import chain, random_graph
from booltype.definable import (
    build_formula_algebra,
    closure_partition,
    dual_vc,
    instance_elements,
    orbit_partition,
    split,
)
from booltype.local import decompose_peeling, peeling_value
from booltype.measures import (
    KeislerMeasure,
    approximate_by_types,
    average_of_types,
    decompose_measure,
    from_boolean_type,
    interval_of_element,
    restrict_measure,
    smoothness_transfer,
    to_boolean_type,
)

from demo import GOLDEN, run_demo
from helpers import (
    GRAPH_SEED,
    as_set,
    brute_full_conjugate,
    brute_homomorphisms,
    corpus,
    largest_independent_brute,
    rational_grid,
    small_instances,
    subsets,
)

# fixed corpus shapes: universes <= 5, tuples <= 2, codomains <= 16 elements
INSTANCES = small_instances(max_atoms=3, ks=(1, 2))
UNARY = [fa for fa in INSTANCES if fa.k == 1]


@contextlib.contextmanager
def criterion(capsys, number: int, title: str):
    """Print the pass/fail line for one criterion; the body fills ``notes``."""
    notes: list[str] = []
    ok = False
    try:
        yield notes
        ok = True
    finally:
        with capsys.disabled():
            detail = f" ({'; '.join(notes)})" if notes else ""
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {title}{detail}")


def binary_formulas(s):
    out = ["x0 = y0"]
    for rel in s.relations:
        sym = rel.symbol
        out.append(f"{sym}(x0, y0)" if sym.isalnum() else f"x0 {sym} y0")
    return out


def test_criterion_01_sikorski_oracle(capsys):
    rng = random.Random(20260101)
    with criterion(capsys, 1, "Sikorski extension agrees with brute-force homomorphisms") as notes:
        instances = intervals = 0
        while instances < 250:
            dom = FiniteBooleanAlgebra(rng.randint(1, 4))
            cod = FiniteBooleanAlgebra(rng.randint(1, 4))
            keys = rng.sample(range(dom.full_mask + 1), rng.randint(0, min(4, dom.full_mask + 1)))
            f = {dom.from_mask(k): cod.from_mask(rng.randint(0, cod.full_mask)) for k in keys}
            brute = [h for h in brute_homomorphisms(dom.atom_count, cod.atom_count)
                     if all(h[as_set(k)] == as_set(v) for k, v in f.items())]
            res = sikorski_extendable(f, dom, cod)
            assert res.extendable == bool(brute)
            instances += 1
            if not res.extendable:
                continue
            assert all(res.witness(k) == v for k, v in f.items())
            sub = generated_subalgebra(list(f), dom)
            h = Homomorphism(sub, cod, tuple(res.witness(Element(dom, blk)) for blk in sub.blocks))
            for a in dom.elements():
                ext = one_point_extension_interval(h, a)
                achievable = {g(a) for g in all_homomorphisms(dom, cod) if g.extends(h)}
                assert achievable == {b for b in cod.elements() if ext.admits(b)}
                intervals += 1
        notes.append(f"{instances} instances, {intervals} intervals")


def test_criterion_02_definability_oracle(capsys):
    with criterion(capsys, 2, "orbit partition equals syntactic closure partition") as notes:
        checked = 0
        for s in corpus():
            for k in (1, 2):
                for params in subsets(s.universe_size, 1) if k == 1 else [(), (0,)]:
                    fa = build_formula_algebra(s, k, params)
                    assert closure_partition(s, k, params) == orbit_partition(fa)
                    checked += 1
        notes.append(f"{checked} algebras over {len(corpus())} structures")


def _types(instances, max_codomain):
    for fa in instances:
        for c in range(1, max_codomain + 1):
            yield from enumerate_types(fa, FiniteBooleanAlgebra(c))


def test_criterion_03_decomposition_identity(capsys):
    with criterion(capsys, 3, "decomposition identity and peeling agreement") as notes:
        count = 0
        for q in _types(INSTANCES, 4):
            parts = decompose(q)
            values = [b for b, _ in parts]
            assert all(not b.is_zero for b in values)
            assert all((x & y).is_zero for x, y in itertools.combinations(values, 2))
            assert join(values, q.codomain).is_one
            levels = decompose_peeling(q)
            whole = Subalgebra.whole(q.domain.algebra)
            for e in q.domain.algebra.elements():
                expected = join((b for b, r in parts if r.contains(e)), q.codomain)
                assert q(e) == expected == recompose(parts, e, q.codomain)
                assert peeling_value(levels, e, whole, q.codomain) == q(e)
            count += 1
        notes.append(f"{count} types")


def _brute_maximal(p) -> bool:
    total = realized_sum(p)
    for b in supersets(p.params, p.domain.m):
        fine = build_formula_algebra(p.structure, p.domain.k, b)
        if any(not realized_sum(q) <= total for q in extensions(p, fine)):
            return False
    return True


def test_criterion_04_smoothness_ladder(capsys):
    with criterion(capsys, 4, "realized => smooth => maximal; blocking atom <=> not maximal") as notes:
        count = realized = smooth = maximal = 0
        for p in _types(INSTANCES, 3):
            r, s, m = is_realized(p), is_smooth_within(p), _brute_maximal(p)
            assert (not r or s) and (not s or m)
            assert bool(blocking_atoms(p)) == (not m)
            count += 1
            realized += r
            smooth += s
            maximal += m
        notes.append(f"{count} types: {realized} realized, {smooth} smooth, {maximal} maximal")


def test_criterion_05_fingerprints(capsys):
    with criterion(capsys, 5, "fingerprint injectivity and conjugacy soundness") as notes:
        types_seen = pairs = 0
        for fa in INSTANCES:
            for c in (1, 2, 3):
                types = enumerate_types(fa, FiniteBooleanAlgebra(c))
                seen = {}
                for p in types:
                    fp = fingerprint(p)
                    key = (fp.image_blocks, fp.companion)
                    assert seen.setdefault(key, p) == p
                types_seen += len(types)
                full = classify(types, "full")
                cls = {i: n for n, members in enumerate(full) for i in members}
                for i, j in itertools.combinations(range(len(types)), 2):
                    if fingerprint_conjugate(types[i], types[j]):
                        assert cls[i] == cls[j]
                        assert brute_full_conjugate(types[i], types[j])
                        pairs += 1
        notes.append(f"{types_seen} types, {pairs} fingerprint-conjugate pairs")


def test_criterion_06_image_bound(capsys):
    with criterion(capsys, 6, "no independent set of size dual VC + 1 among restricted values") as notes:
        checks = 0
        for fa in UNARY:
            s = fa.structure
            for text in binary_formulas(s):
                phi = split(text, 1, s)
                n = dual_vc(s, phi).dimension
                for c in (2, 3, 4):
                    for p in enumerate_types(fa, FiniteBooleanAlgebra(c)):
                        values = list(dict.fromkeys(as_set(v) for v in instance_values(p, phi)))
                        assert largest_independent_brute(values, c) <= n
                        checks += 1
        g = random_graph(5, GRAPH_SEED)
        phi = split("R(x0, y0)", 1, g)
        rep = dual_vc(g, phi)
        p = construct_surjective_type(g, phi, FiniteBooleanAlgebra(2))
        image = len(list(restricted_image(p, phi).elements()))
        assert rep.dimension >= 2 and image == 4
        notes.append(f"{checks} type/formula pairs; graph5s42 image {image} of 4")


def test_criterion_07_chain_antichain_law(capsys):
    with criterion(capsys, 7, "chain interval images partition the unit") as notes:
        count = 0
        for n in (3, 4, 5):
            fa = build_formula_algebra(chain(n), 1, range(n))
            for c in (1, 2, 3):
                for p in enumerate_types(fa, FiniteBooleanAlgebra(c)):
                    images = chain_interval_images(p)
                    assert all((x & y).is_zero for x, y in itertools.combinations(images, 2))
                    assert join(images, p.codomain).is_one
                    count += 1
        notes.append(f"{count} types on chains 3-5")


def _grid(fa, denominators):
    seen = set()
    for d in denominators:
        for w in rational_grid(fa.atom_count, d):
            if w not in seen:
                seen.add(w)
                yield KeislerMeasure(fa, w)


def test_criterion_08_measure_round_trip(capsys):
    with criterion(capsys, 8, "measure <-> type round trip, decomposition, injectivity") as notes:
        count = 0
        for fa in INSTANCES:
            images = {}
            for lam in _grid(fa, range(1, 7)):
                pair = to_boolean_type(lam)
                assert from_boolean_type(pair.canonical_type, pair.quotient) == lam
                parts = decompose_measure(lam)
                for e in fa.algebra.elements():
                    assert lam(e) == sum((w for w, c in parts if c.contains(e)), Fraction(0))
                key = (pair.quotient.atom_weights, pair.canonical_type.masks())
                assert images.setdefault(key, lam) == lam
                count += 1
        notes.append(f"{count} grid measures")


def test_criterion_09_approximation(capsys):
    with criterion(capsys, 9, "averages of types within 1/m on every instance") as notes:
        count = 0
        worst = {}
        for fa in UNARY:
            s = fa.structure
            for text in binary_formulas(s):
                phi = split(text, 1, s)
                insts = [e for _, e in instance_elements(fa, phi)]
                if not insts:
                    # no parameter tuples, so nothing to approximate
                    continue
                for lam in _grid(fa, (1, 2, 3, 4)):
                    for m in (2, 5, 10):
                        ps = approximate_by_types(lam, phi, m)
                        err = max(abs(lam(e) - average_of_types(ps, e)) for e in insts)
                        assert err < Fraction(1, m)
                        worst[m] = max(worst.get(m, Fraction(0)), err)
                        count += 1
        notes.append(f"{count} runs; worst error " + ", ".join(f"m={m}: {e}" for m, e in sorted(worst.items())))


def test_criterion_10_extension_interval(capsys):
    denom = 12
    with criterion(capsys, 10, "achievable extension values fill the interval exactly") as notes:
        count = 0
        for fa in UNARY:
            s = fa.structure
            for extra in range(s.universe_size):
                if extra in fa.params:
                    continue
                fine = build_formula_algebra(s, 1, tuple(sorted(set(fa.params) | {extra})))
                if fine.atom_count > 4:
                    continue
                grid = [KeislerMeasure(fine, w) for w in rational_grid(fine.atom_count, denom)]
                for lam in _grid(fa, (1, 2, 3, 4)):
                    above = [mu for mu in grid if restrict_measure(mu, fa) == lam]
                    for e in fine.algebra.elements():
                        iv = interval_of_element(lam, e, fine)
                        achieved = {mu(e) for mu in above}
                        expected = {Fraction(i, denom) for i in range(denom + 1)
                                    if iv.lo <= Fraction(i, denom) <= iv.hi}
                        assert achieved == expected
                        count += 1
        notes.append(f"{count} (measure, refinement element) pairs")


def test_criterion_11_smoothness_transfer(capsys):
    with criterion(capsys, 11, "measure smooth <=> canonical type smooth") as notes:
        vacuous = non_vacuous = 0
        for fa in UNARY:
            for lam in _grid(fa, (1, 2, 3, 4)):
                rep = smoothness_transfer(lam)
                assert rep.agrees
                if rep.vacuous:
                    vacuous += 1
                else:
                    non_vacuous += 1
        assert non_vacuous >= 3
        notes.append(f"{non_vacuous} non-vacuous, {vacuous} vacuous")


def test_criterion_12_cli_determinism(capsys):
    with criterion(capsys, 12, "demo transcript matches the golden file byte for byte") as notes:
        first, second = run_demo(), run_demo()
        golden = GOLDEN.read_text()
        assert first == second == golden
        notes.append(f"{golden.count(chr(10))} lines")

