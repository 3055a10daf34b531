"""Deterministic test structures.

Random graphs use a fixed hash-parity rule so output does not depend on the
platform RNG: vertices ``i < j`` are adjacent iff the lowest bit of the first
byte of ``sha256(f"{seed}:{i}:{j}")`` is 1.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

from .errors import BooltypeError
from .structure import FiniteStructure, Relation

KINDS = ("chain", "cycle", "random-graph", "equivalence", "pure-equality")


def hash_bit(seed: int, i: int, j: int) -> int:
    return hashlib.sha256(f"{seed}:{i}:{j}".encode()).digest()[0] & 1


def chain(n: int) -> FiniteStructure:
    return FiniteStructure(f"chain{n}", n, (Relation("<", 2, frozenset((i, j) for i in range(n) for j in range(i + 1, n))),))


def cycle(n: int) -> FiniteStructure:
    if n < 3:
        raise BooltypeError("a cycle needs at least 3 vertices")
    edges = {(i, (i + 1) % n) for i in range(n)}
    edges |= {(j, i) for i, j in edges}
    return FiniteStructure(f"cycle{n}", n, (Relation("R", 2, frozenset(edges)),))


def random_graph(n: int, seed: int = 0) -> FiniteStructure:
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if hash_bit(seed, i, j):
                edges |= {(i, j), (j, i)}
    return FiniteStructure(f"graph{n}s{seed}", n, (Relation("R", 2, frozenset(edges)),))


def equivalence(blocks: Sequence[int]) -> FiniteStructure:
    if not blocks or any(b < 1 for b in blocks):
        raise BooltypeError("equivalence blocks must be positive sizes")
    pairs = set()
    start = 0
    for size in blocks:
        members = range(start, start + size)
        pairs |= {(i, j) for i in members for j in members}
        start += size
    name = "equiv" + "-".join(map(str, blocks))
    return FiniteStructure(name, start, (Relation("E", 2, frozenset(pairs)),))


def pure_equality(n: int) -> FiniteStructure:
    return FiniteStructure(f"eq{n}", n, ())


def generate_corpus(kind: str, size: int = 0, seed: int = 0, blocks: Sequence[int] | None = None) -> FiniteStructure:
    """One corpus structure; for ``equivalence`` the block sizes replace ``size``."""
    if kind == "chain":
        return chain(size)
    if kind == "cycle":
        return cycle(size)
    if kind == "random-graph":
        return random_graph(size, seed)
    if kind == "equivalence":
        if blocks is None:
            raise BooltypeError("equivalence needs block sizes")
        return equivalence(blocks)
    if kind == "pure-equality":
        return pure_equality(size)
    raise BooltypeError(f"unknown corpus kind {kind!r}; expected one of {', '.join(KINDS)}")
