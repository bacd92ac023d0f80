"""Reducts, embeddings of closure semilattices into closure spaces, and full representations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .bits import iter_bits, mask_of
from .errors import SizeCapError
from .extension import FreeExtension, build_free_extension
from .lattice import FiniteJoinSemilattice
from .reports import Report
from .structures import (
    DEFAULT_MAX_ELEMENTS,
    DEFAULT_MAX_POINTS,
    ClosureSemilattice,
    ClosureSpace,
    InducedRelation,
    SpecRelation,
    SpecStructure,
    check_points,
)

# Triples of subsets are searched; 8 points means 2**16 (b, c) pairs.
DEFAULT_MAX_SEARCH_POINTS = 8
DEFAULT_MAX_GROUND = 256


def reduct_of_closure_semilattice(S: ClosureSemilattice) -> SpecStructure:
    """``a ⊑ B`` iff ``a <= K b1 v ... v K bn``."""
    return SpecStructure(S.lattice, InducedRelation(S.lattice, S.k))


def subset_label(X: ClosureSpace, mask: int) -> str:
    return "{" + ",".join(X.names(mask)) + "}"


def powerset_lattice(X: ClosureSpace) -> FiniteJoinSemilattice:
    """``P(X)`` under union; element ``i`` is the subset with bitmask ``i``."""
    size = 1 << X.size
    return FiniteJoinSemilattice.from_table([subset_label(X, m) for m in range(size)],
                                            [[a | b for b in range(size)] for a in range(size)])


def reduct_of_closure_space(X: ClosureSpace, max_elements: int = DEFAULT_MAX_ELEMENTS) -> SpecStructure:
    """The structure on ``P(X)``: ``a ⊑ B`` iff ``a ⊆ K b1 ∪ ... ∪ K bn``."""
    size = 1 << X.size
    if size > max_elements:
        raise SizeCapError(f"P(X) has {size} elements, cap is {max_elements}")
    K = [X.closure(m) for m in range(size)]
    table = [0]
    for B in range(1, 1 << size):
        union = 0
        for b in iter_bits(B):
            union |= K[b]
        table.append(mask_of(a for a in range(size) if a & ~union == 0))
    return SpecStructure(powerset_lattice(X), SpecRelation(size, tuple(table)))


def closure_space_semilattice(X: ClosureSpace, max_elements: int = DEFAULT_MAX_ELEMENTS) -> ClosureSemilattice:
    size = 1 << X.size
    if size > max_elements:
        raise SizeCapError(f"P(X) has {size} elements, cap is {max_elements}")
    return ClosureSemilattice(powerset_lattice(X), tuple(X.closure(m) for m in range(size)))


@dataclass(frozen=True)
class SpaceEmbedding:
    """``map[a]`` is the subset of ``space.points`` assigned to source element ``a``."""

    source: Union[ClosureSemilattice, SpecStructure]
    space: ClosureSpace
    map: tuple[int, ...]
    report: Report

    @property
    def ok(self) -> bool:
        return self.report.ok

    def named(self) -> dict[str, list[str]]:
        L = self.source.lattice
        return {L.name(a): self.space.names(m) for a, m in enumerate(self.map)}


def intersection_closure(family: set[int], full: int) -> set[int]:
    closed = set(family) | {full}
    frontier = list(closed)
    while frontier:
        c = frontier.pop()
        for d in list(closed):
            e = c & d
            if e not in closed:
                closed.add(e)
                frontier.append(e)
    return closed


def embed_closure_semilattice(S: ClosureSemilattice) -> SpaceEmbedding:
    """Send ``a`` to ``{b | a not <= b}`` inside a closure space on the carrier of ``S``.

    Closed sets are the images of the closed elements, plus the carrier, closed
    under intersection.  The report verifies injectivity, join to union, order
    reflection and ``phi(Ka) = K phi(a)``.
    """
    L, K = S.lattice, S.k
    n = L.n
    phi = tuple(mask_of(b for b in range(n) if not L.leq(a, b)) for a in range(n))
    full = (1 << n) - 1
    closed = intersection_closure({phi[z] for z in range(n) if K[z] == z}, full)
    space = ClosureSpace(L.elements, tuple(closed))
    report = Report("embedding", info={"points": n, "closed_sets": len(space.closed)})
    name = L.name
    report.add("injective", next(({"a": name(a), "b": name(b)} for a in range(n) for b in range(a + 1, n)
                                  if phi[a] == phi[b]), None))
    report.add("join-to-union", next(({"a": name(a), "b": name(b)} for a in range(n) for b in range(n)
                                      if phi[L.j(a, b)] != phi[a] | phi[b]), None))
    report.add("order-reflecting", next(({"a": name(a), "b": name(b)} for a in range(n) for b in range(n)
                                         if (phi[a] & ~phi[b] == 0) != L.leq(a, b)), None))
    report.add("closure", next(({"a": name(a)} for a in range(n) if phi[K[a]] != space.closure(phi[a])), None))
    return SpaceEmbedding(S, space, phi, report)


def represent(M: SpecStructure, extension: FreeExtension | None = None,
              max_ground: int = DEFAULT_MAX_GROUND) -> SpaceEmbedding:
    """Embed ``M`` into the reduct of a closure space through its free extension."""
    E = extension or build_free_extension(M)
    if E.size > max_ground:
        raise SizeCapError(f"extension has {E.size} classes, cap is {max_ground}")
    inner = embed_closure_semilattice(E.closure_semilattice)
    space = inner.space
    iota = tuple(inner.map[E.unit_map[a]] for a in range(M.n))
    report = Report("representation", info={"ground_set": space.size, "closed_sets": len(space.closed)})
    for v in inner.report.verdicts:
        report.verdicts.append(v)
    report.add("iota-injective", None if len(set(iota)) == M.n else {"reason": "two elements share an image"})
    closures = [space.closure(m) for m in iota]
    bad = None
    for a in range(M.n):
        for B in range(1, 1 << M.n):
            union = 0
            for b in iter_bits(B):
                union |= closures[b]
            if M.holds(a, B) != (iota[a] & ~union == 0):
                bad = dict(M.pair_names(a, B), holds_in_M=M.holds(a, B))
                break
        if bad:
            break
    report.add("relation", bad)
    return SpaceEmbedding(M, space, iota, report)


def topological_check(X: ClosureSpace, max_points: int = DEFAULT_MAX_POINTS) -> bool:
    """``K∅ = ∅`` and ``K(x ∪ y) = Kx ∪ Ky``.

    Additivity for all pairs is equivalent to ``Kx`` being the union of the
    closures of the points of ``x``, which needs only one pass over subsets.
    """
    check_points(X, max_points)
    if X.closure(0) != 0:
        return False
    single = [X.closure(1 << p) for p in range(X.size)]
    for x in range(1, X.full + 1):
        union = 0
        for p in iter_bits(x):
            union |= single[p]
        if X.closure(x) != union:
            return False
    return True


def topo_gap_witness(X: ClosureSpace, max_points: int = DEFAULT_MAX_SEARCH_POINTS) -> tuple[int, int, int] | None:
    """Least ``(a, b, c)`` (masks, lexicographic) with ``a ⊆ K(b ∪ c)`` but ``a ⊄ Kb ∪ Kc``.

    For fixed ``(b, c)`` the least such ``a`` is the lowest point of
    ``K(b ∪ c) - (Kb ∪ Kc)``, so the search runs over pairs only.
    """
    check_points(X, max_points)
    size = 1 << X.size
    K = [X.closure(m) for m in range(size)]
    best = None
    for b in range(size):
        for c in range(size):
            gap = K[b | c] & ~(K[b] | K[c])
            if gap:
                cand = (gap & -gap, b, c)
                if best is None or cand < best:
                    best = cand
    return best
