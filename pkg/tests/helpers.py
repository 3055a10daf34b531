"""Test corpus and brute-force oracles.

The oracles deliberately avoid the library's algorithms: they work on
frozensets, enumerate permutations and maps directly, and evaluate formulas
by recursion over variable assignments.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

from booltype.algebra import Element, FiniteBooleanAlgebra
from booltype.corpus import chain, cycle, equivalence, pure_equality, random_graph
from booltype.definable import build_formula_algebra
from booltype.formula import And, Eq, Exists, Forall, Implies, Not, Or, Rel, Var

GRAPH_SEED = 42


def corpus():
    """The fixed corpus: universes of size at most 5."""
    return [
        pure_equality(3),
        pure_equality(4),
        chain(3),
        chain(4),
        chain(5),
        cycle(4),
        cycle(5),
        equivalence((2, 2, 1)),
        equivalence((2, 1)),
        random_graph(5, GRAPH_SEED),
    ]


def subsets(m: int, max_size: int | None = None):
    top = m if max_size is None else min(m, max_size)
    for r in range(top + 1):
        yield from itertools.combinations(range(m), r)


def small_instances(max_atoms: int = 3, ks=(1, 2), max_params: int | None = None):
    """Formula algebras (structure, k, params) with at most ``max_atoms`` atoms."""
    out = []
    for s in corpus():
        for k in ks:
            if s.universe_size ** k > 25:
                continue
            for params in subsets(s.universe_size, max_params):
                fa = build_formula_algebra(s, k, params)
                if fa.atom_count <= max_atoms:
                    out.append(fa)
    return out


# --- algebra oracles -----------------------------------------------------------------

def all_elements(n: int):
    return [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


def as_set(e: Element) -> frozenset:
    return frozenset(e.atoms)


@functools.lru_cache(maxsize=None)
def brute_homomorphisms(n_dom: int, n_cod: int):
    """Maps on all elements given as dicts frozenset -> frozenset, checked against every law.

    Atom images are assigned one at a time; an assignment is abandoned once
    two images overlap, the rest is filtered by checking the laws directly.
    """
    dom, cod_full = all_elements(n_dom), frozenset(range(n_cod))
    full = frozenset(range(n_dom))
    cod = all_elements(n_cod)
    out = []

    def assign(images, used):
        if len(images) == n_dom:
            h = {x: frozenset().union(*(images[i] for i in x)) if x else frozenset() for x in dom}
            ok = h[full] == cod_full and h[frozenset()] == frozenset()
            ok = ok and all(h[x & y] == h[x] & h[y] for x in dom for y in dom)
            ok = ok and all(h[full - x] == cod_full - h[x] for x in dom)
            if ok:
                out.append(h)
            return
        for img in cod:
            if not img & used:
                assign(images + [img], used | img)

    assign([], frozenset())
    return tuple(out)


def brute_closure(n: int, gens):
    """Closure of ``gens`` and 0, 1 under meet, join and complement."""
    full = frozenset(range(n))
    closed = {frozenset(), full} | {frozenset(g) for g in gens}
    while True:
        new = set(closed)
        for x in closed:
            new.add(full - x)
            for y in closed:
                new.add(x & y)
                new.add(x | y)
        if new == closed:
            return closed
        closed = new


def brute_independent(sets, n: int) -> bool:
    full = frozenset(range(n))
    for signs in itertools.product((True, False), repeat=len(sets)):
        prod = full
        for s, sign in zip(sets, signs):
            prod &= s if sign else full - s
        if not prod:
            return False
    return True


def largest_independent_brute(sets, n: int) -> int:
    best = 0
    for r in range(1, len(sets) + 1):
        if any(brute_independent(list(c), n) for c in itertools.combinations(sets, r)):
            best = r
    return best


# --- structure oracles --------------------------------------------------------------

def brute_automorphisms(s):
    m = s.universe_size
    out = []
    for perm in itertools.permutations(range(m)):
        if all({tuple(perm[v] for v in t) for t in rel.tuples} == set(rel.tuples) for rel in s.relations):
            out.append(perm)
    return out


def brute_orbits(s, k: int, params) -> set[frozenset]:
    autos = [g for g in brute_automorphisms(s) if all(g[a] == a for a in params)]
    seen, orbits = set(), set()
    for t in itertools.product(range(s.universe_size), repeat=k):
        if t in seen:
            continue
        orb = frozenset(tuple(g[v] for v in t) for g in autos)
        seen |= orb
        orbits.add(orb)
    return orbits


def naive_holds(f, s, env: dict) -> bool:
    """Recursive model checking over explicit assignments."""
    def val(t):
        return env[t.name] if isinstance(t, Var) else t.index

    if isinstance(f, Rel):
        return tuple(val(t) for t in f.terms) in s.relation(f.symbol).tuples
    if isinstance(f, Eq):
        return val(f.left) == val(f.right)
    if isinstance(f, Not):
        return not naive_holds(f.body, s, env)
    if isinstance(f, And):
        return naive_holds(f.left, s, env) and naive_holds(f.right, s, env)
    if isinstance(f, Or):
        return naive_holds(f.left, s, env) or naive_holds(f.right, s, env)
    if isinstance(f, Implies):
        return (not naive_holds(f.left, s, env)) or naive_holds(f.right, s, env)
    if isinstance(f, Exists):
        return any(naive_holds(f.body, s, {**env, f.var: v}) for v in range(s.universe_size))
    if isinstance(f, Forall):
        return all(naive_holds(f.body, s, {**env, f.var: v}) for v in range(s.universe_size))
    raise TypeError(f)


def naive_truth_set(f, s, k: int) -> frozenset:
    return frozenset(t for t in itertools.product(range(s.universe_size), repeat=k)
                     if naive_holds(f, s, {f"x{i}": v for i, v in enumerate(t)}))


def brute_dual_vc(s, table_fn) -> int:
    """Largest set of parameters b shattered by {x : table_fn(x, b)} over x."""
    m = s.universe_size
    pts = list(range(m))
    best = 0
    for r in range(1, m + 1):
        for c in itertools.combinations(pts, r):
            patterns = {tuple(table_fn(x, b) for b in c) for x in range(m)}
            if len(patterns) == 2 ** r:
                best = r
                break
        else:
            break
    return best


def brute_ladder(s, rel_fn, max_n: int = 5) -> int:
    m = s.universe_size
    best = 0
    for n in range(1, max_n + 1):
        found = False
        for a in itertools.product(range(m), repeat=n):
            for b in itertools.product(range(m), repeat=n):
                if all(rel_fn(a[i], b[j]) == (i <= j) for i in range(n) for j in range(n)):
                    found = True
                    break
            if found:
                break
        if not found:
            break
        best = n
    return best


def rational_grid(n_atoms: int, denom: int):
    """Every probability vector with entries in (1/denom)Z."""
    for parts in itertools.product(range(denom + 1), repeat=n_atoms):
        if sum(parts) == denom:
            yield tuple(Fraction(p, denom) for p in parts)


def algebra(n: int, name: str = "B") -> FiniteBooleanAlgebra:
    return FiniteBooleanAlgebra(n, name=name)


def brute_full_conjugate(p1, p2):
    """Some automorphism fixing the parameters setwise matches the zero patterns.

    An isomorphism between image subalgebras exists exactly when the same
    atoms are sent to 0, so this decides the composite relation directly.
    """
    fa = p1.domain
    for g in brute_automorphisms(fa.structure):
        if sorted(g[a] for a in fa.params) != list(fa.params):
            continue
        moved = [None] * fa.atom_count
        for i in range(fa.atom_count):
            moved[fa.atom_of(tuple(g[v] for v in fa.representative(i)))] = p2.atom_images[i]
        if all(a.is_zero == b.is_zero for a, b in zip(p1.atom_images, moved)):
            return True
    return False
