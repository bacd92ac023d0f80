"""Exhaustive and seeded-random generation of small structures, plus witness search.

Random streams use SplitMix64 so corpora can be reproduced bit for bit by any
implementation: state advances by 0x9E3779B97F4A7C15, output is the standard
xor-shift-multiply finalizer.  ``below(n)`` is ``next_u64() % n`` and
``random()`` is ``(next_u64() >> 11) * 2**-53``.  Seed 0 yields
0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F.
"""
from __future__ import annotations

import itertools
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from typing import Any

from .axioms import check_regular, saturate
from .bits import iter_bits
from .errors import SizeCapError
from .lattice import FiniteJoinSemilattice
from .representation import intersection_closure, topo_gap_witness
from .structures import (
    ClosureSemilattice,
    ClosureSpace,
    Homomorphism,
    SpecRelation,
    SpecStructure,
    check_homomorphism,
)

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        return self.next_u64() % n

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53


@dataclass(frozen=True)
class GenConfig:
    size: int
    seed: int = 0
    density: float = 0.5

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size bound must be at least 1")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")


def next_closure(m: int, closure: Callable[[int], int]) -> Iterator[int]:
    """All closed subsets of ``range(m)`` (as bitmasks) in lectic order, each once."""
    A = closure(0)
    yield A
    while True:
        for i in range(m - 1, -1, -1):
            bit = 1 << i
            if A & bit:
                A &= ~bit
                continue
            B = closure(A | bit)
            if (B & ~A) & (bit - 1) == 0:
                A = B
                yield A
                break
        else:
            return


def enum_closure_systems(n: int) -> Iterator[ClosureSpace]:
    """Every intersection-closed family on ``{1..n}`` containing the ground set."""
    if n > 4:
        raise SizeCapError(f"closure systems are enumerated for n <= 4, got {n}")
    points = tuple(str(i + 1) for i in range(n))
    full = (1 << n) - 1
    items = 1 << n

    def closure(family_mask: int) -> int:
        family = intersection_closure(set(iter_bits(family_mask)), full)
        return sum(1 << c for c in family)

    for family_mask in next_closure(items, closure):
        yield ClosureSpace(points, tuple(iter_bits(family_mask)))


def _relabel(table: tuple[tuple[int, ...], ...], perm: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    n = len(table)
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    return tuple(tuple(perm[table[inv[i]][inv[j]]] for j in range(n)) for i in range(n))


def canonical_table(table) -> tuple[tuple[int, ...], ...]:
    """Least row-major join table over all relabelings of the carrier."""
    table = tuple(tuple(r) for r in table)
    return min(_relabel(table, perm) for perm in itertools.permutations(range(len(table))))


def enum_join_semilattices(n: int) -> list[FiniteJoinSemilattice]:
    """One representative per isomorphism class, in canonical-table order."""
    if n > 5:
        raise SizeCapError(f"join-semilattices are enumerated for n <= 5, got {n}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    found = set()
    for code in range(1 << len(pairs)):
        # strict order contained in the natural order i < j
        lt = [[False] * n for _ in range(n)]
        for k, (i, j) in enumerate(pairs):
            if code >> k & 1:
                lt[i][j] = True
        if any(lt[i][j] and lt[j][k] and not lt[i][k]
               for i in range(n) for j in range(n) for k in range(n)):
            continue
        le = [[i == j or lt[i][j] for j in range(n)] for i in range(n)]
        table = []
        ok = True
        for i in range(n):
            row = []
            for j in range(n):
                ups = [z for z in range(n) if le[i][z] and le[j][z]]
                least = [z for z in ups if all(le[z][w] for w in ups)]
                if not least:
                    ok = False
                    break
                row.append(least[0])
            if not ok:
                break
            table.append(row)
        if ok:
            found.add(canonical_table(table))
    names = [str(i) for i in range(n)]
    return [FiniteJoinSemilattice.from_table(names, t) for t in sorted(found)]


def _union_closure(family: set[int]) -> set[int]:
    closed = set(family)
    frontier = list(closed)
    while frontier:
        x = frontier.pop()
        for y in list(closed):
            z = x | y
            if z not in closed:
                closed.add(z)
                frontier.append(z)
    return closed


def random_join_semilattice(cfg: GenConfig, rng: SplitMix64 | None = None) -> FiniteJoinSemilattice:
    """A union-closed family of subsets of a ``target``-point set, ``target <= cfg.size``.

    Draws random nonempty subsets and keeps each whose union-closure still fits.
    """
    rng = rng or SplitMix64(cfg.seed)
    target = 1 + rng.below(cfg.size)
    span = (1 << target) - 1
    family: set[int] = set()
    for _ in range(16 * target):
        if len(family) == target:
            break
        cand = _union_closure(family | {1 + rng.below(span)})
        if len(cand) <= target:
            family = cand
    masks = sorted(family)
    index = {m: i for i, m in enumerate(masks)}
    return FiniteJoinSemilattice.from_table([str(i) for i in range(len(masks))],
                                            [[index[a | b] for b in masks] for a in masks])


def random_closure_semilattice(cfg: GenConfig, rng: SplitMix64 | None = None) -> ClosureSemilattice:
    """Random lattice with a random closure: a random set of closed elements containing the top,
    thinned until every element has a least closed element above it."""
    rng = rng or SplitMix64(cfg.seed)
    L = random_join_semilattice(cfg, rng)
    n = L.n
    closed = {x for x in range(n) if x == L.top or rng.below(2)}

    def minimal_above(x):
        above = [c for c in closed if L.leq(x, c)]
        return [c for c in above if not any(d != c and L.leq(d, c) for d in above)]

    while True:
        crowded = next((m for x in range(n) if len(m := sorted(minimal_above(x))) > 1), None)
        if crowded is None:
            break
        closed.discard(crowded[rng.below(len(crowded))] if L.top not in crowded else crowded[0])
    k = tuple(minimal_above(x)[0] for x in range(n))
    return ClosureSemilattice(L, k)


def random_spec_structure(cfg: GenConfig, rng: SplitMix64 | None = None) -> SpecStructure:
    """Random lattice, each ``(a, B)`` seeded with probability ``cfg.density``, then saturated."""
    rng = rng or SplitMix64(cfg.seed)
    L = random_join_semilattice(cfg, rng)
    n = L.n
    pairs = [(a, B) for a in range(n) for B in range(1, 1 << n) if rng.random() < cfg.density]
    return SpecStructure(L, saturate(L, SpecRelation.from_pairs(n, pairs)))


def random_corpus(count: int, size: int, densities=(0.0, 0.1, 0.5, 1.0), seed: int = 0) -> list[SpecStructure]:
    """``count`` structures cycling through ``densities``; structure ``i`` uses seed ``seed + i``."""
    return [random_spec_structure(GenConfig(size, seed + i, densities[i % len(densities)]))
            for i in range(count)]


def all_saturated_relations(L: FiniteJoinSemilattice) -> Iterator[SpecRelation]:
    """Every relation on ``L`` satisfying the axioms, in lectic order over (rhs, lhs) items."""
    n = L.n
    if n > 4:
        raise SizeCapError(f"saturated relations are enumerated for n <= 4, got {n}")
    items = [(a, B) for B in range(1, 1 << n) for a in range(n)]

    def to_rel(mask):
        return SpecRelation.from_pairs(n, (items[i] for i in iter_bits(mask)))

    def closure(mask):
        rel = saturate(L, to_rel(mask))
        return sum(1 << i for i, (a, B) in enumerate(items) if rel.holds(a, B))

    for mask in next_closure(len(items), closure):
        yield to_rel(mask)


def exhaustive_structures(max_size: int) -> Iterator[SpecStructure]:
    """All axiom-satisfying structures up to isomorphism of the lattice, by size."""
    for n in range(1, max_size + 1):
        for L in enum_join_semilattices(n):
            for rel in all_saturated_relations(L):
                yield SpecStructure(L, rel)


HOMOMORPHISM_CAP = 10 ** 6


def enum_homomorphisms(M: SpecStructure, T: SpecStructure, cap: int = HOMOMORPHISM_CAP) -> list[Homomorphism]:
    """Every join- and relation-preserving map, in lexicographic order of image tuples."""
    if T.n ** M.n > cap:
        raise SizeCapError(f"{T.n}**{M.n} candidate maps exceed cap {cap}")
    out = []
    for mapping in itertools.product(range(T.n), repeat=M.n):
        h = Homomorphism(M, T, mapping)
        if check_homomorphism(h).ok:
            out.append(h)
    return out


@dataclass(frozen=True)
class SearchResult:
    predicate: str
    structure: Any
    witness: dict


PREDICATES = ("topo-gap", "non-regular")


def search_witness(predicate: str, bound: int) -> SearchResult | None:
    """Smallest structure (by size, then canonical order) satisfying ``predicate``."""
    if predicate == "topo-gap":
        if bound > 4:
            raise SizeCapError("topo-gap search is bounded by 4 points")
        for n in range(1, bound + 1):
            for X in enum_closure_systems(n):
                w = topo_gap_witness(X)
                if w is not None:
                    a, b, c = w
                    return SearchResult(predicate, X, {"a": X.names(a), "b": X.names(b), "c": X.names(c)})
        return None
    if predicate == "non-regular":
        if bound > 4:
            # a non-regular structure already exists on 4 elements
            bound = 4
        for S in exhaustive_structures(bound):
            report = check_regular(S)
            if not report.ok:
                return SearchResult(predicate, S, report.first_failure().witness)
        return None
    raise ValueError(f"unknown predicate {predicate!r}; expected one of {PREDICATES}")
