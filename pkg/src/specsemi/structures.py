"""Specialization relations, closure semilattices, closure spaces and homomorphisms.

Right-hand sides of the multi-argument relation are *sets* of elements, kept as
bitmasks.  Reordering and repeating arguments therefore cannot change the
relation: permutation invariance and duplicate absorption hold by construction.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Protocol, Union

from .bits import iter_bits, mask_of, popcount
from .errors import SizeCapError, StructureError, UnknownElementError
from .lattice import FiniteJoinSemilattice
from .reports import Report

DEFAULT_MAX_ELEMENTS = 12
DEFAULT_MAX_POINTS = 16
# 2**n lhs masks are stored per relation
EXPLICIT_LIMIT = 16


class Relation(Protocol):
    n: int

    def holds(self, a: int, mask: int) -> bool: ...


@dataclass(frozen=True)
class SpecRelation:
    """Explicit relation: ``lhs[B]`` is the bitmask of all ``a`` with ``a ⊑ B``."""

    n: int
    lhs: tuple[int, ...]

    def __post_init__(self):
        if self.n > EXPLICIT_LIMIT:
            raise SizeCapError(f"explicit relation over {self.n} elements exceeds {EXPLICIT_LIMIT}")
        if len(self.lhs) != 1 << self.n or self.lhs[0]:
            raise StructureError("relation table has the wrong shape")

    @classmethod
    def empty(cls, n: int) -> SpecRelation:
        return cls(n, (0,) * (1 << n))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> SpecRelation:
        table = [0] * (1 << n)
        for a, mask in pairs:
            if not mask:
                raise StructureError("right-hand side must be nonempty")
            table[mask] |= 1 << a
        return cls(n, tuple(table))

    def holds(self, a: int, mask: int) -> bool:
        return bool(self.lhs[mask] >> a & 1)

    def pairs(self) -> Iterator[tuple[int, int]]:
        """Pairs in lexicographic (lhs index, rhs bitmask) order."""
        for a in range(self.n):
            for mask in range(1, 1 << self.n):
                if self.lhs[mask] >> a & 1:
                    yield a, mask

    def __contains__(self, pair) -> bool:
        a, mask = pair
        return self.holds(a, mask)

    def __len__(self) -> int:
        return sum(popcount(m) for m in self.lhs)

    def __le__(self, other: SpecRelation) -> bool:
        return all(x & ~y == 0 for x, y in zip(self.lhs, other.lhs))


@dataclass(frozen=True)
class InducedRelation:
    """``a ⊑ B`` iff ``a <= K b1 v ... v K bn`` for a closure table ``closure``.

    Used for reducts of closure semilattices and for free extensions, whose
    carriers are too large to tabulate all right-hand sides.
    """

    lattice: FiniteJoinSemilattice
    closure: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.lattice.n

    def rhs_join(self, mask: int) -> int:
        J = self.lattice.join
        it = iter_bits(mask)
        acc = self.closure[next(it)]
        for b in it:
            acc = J[acc][self.closure[b]]
        return acc

    def holds(self, a: int, mask: int) -> bool:
        return self.lattice.leq(a, self.rhs_join(mask))

    def pairs(self) -> Iterator[tuple[int, int]]:
        for a in range(self.n):
            for mask in range(1, 1 << self.n):
                if self.holds(a, mask):
                    yield a, mask

    def materialize(self) -> SpecRelation:
        down = self.lattice.down
        table = [0] + [down[self.rhs_join(mask)] for mask in range(1, 1 << self.n)]
        return SpecRelation(self.n, tuple(table))


AnyRelation = Union[SpecRelation, InducedRelation]


@dataclass(frozen=True)
class SpecStructure:
    """A join-semilattice together with a multi-argument specialization relation."""

    lattice: FiniteJoinSemilattice
    rel: AnyRelation

    def __post_init__(self):
        if self.rel.n != self.lattice.n:
            raise StructureError("relation and lattice sizes differ")

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def elements(self) -> tuple[str, ...]:
        return self.lattice.elements

    def holds(self, a: int, mask: int) -> bool:
        return self.rel.holds(a, mask)

    def explicit(self) -> SpecRelation:
        if isinstance(self.rel, SpecRelation):
            return self.rel
        return self.rel.materialize()

    def with_relation(self, rel: AnyRelation) -> SpecStructure:
        return SpecStructure(self.lattice, rel)

    def pair_names(self, a: int, mask: int) -> dict:
        return {"lhs": self.lattice.name(a), "rhs": self.lattice.names(mask)}


def normalize_spec_relation(lattice: FiniteJoinSemilattice,
                            tuples: Iterable[tuple[str | int, Sequence[str | int]]]) -> SpecRelation:
    """Collapse argument order and repetitions: ``(a, [c, b, b])`` becomes ``(a, {b, c})``."""
    pairs = []
    for k, (lhs, rhs) in enumerate(tuples):
        if isinstance(rhs, (str, int)):
            raise StructureError("right-hand side must be a sequence", f"$.spec[{k}][1]")
        if not rhs:
            raise StructureError("right-hand side must be nonempty", f"$.spec[{k}][1]")
        try:
            pairs.append((lattice.index(lhs), mask_of(lattice.index(b) for b in rhs)))
        except UnknownElementError as exc:
            raise UnknownElementError(exc.reason, f"$.spec[{k}]") from None
    return SpecRelation.from_pairs(lattice.n, pairs)


@dataclass(frozen=True)
class ClosureSemilattice:
    lattice: FiniteJoinSemilattice
    k: tuple[int, ...]

    def __post_init__(self):
        if len(self.k) != self.lattice.n:
            raise StructureError("closure table must be total", "$.K")
        for x in self.k:
            if not 0 <= x < self.lattice.n:
                raise UnknownElementError(f"closure value {x!r} is not an element", "$.K")

    @property
    def n(self) -> int:
        return self.lattice.n

    @cached_property
    def fixed(self) -> tuple[int, ...]:
        return tuple(x for x in range(self.n) if self.k[x] == x)


def validate_closure_semilattice(S: ClosureSemilattice) -> Report:
    L, K = S.lattice, S.k
    name = L.name
    report = Report("closure-semilattice")
    report.add("extensive", next(({"a": name(a), "Ka": name(K[a])}
                                  for a in range(L.n) if not L.leq(a, K[a])), None))
    report.add("idempotent", next(({"a": name(a), "Ka": name(K[a]), "KKa": name(K[K[a]])}
                                   for a in range(L.n) if K[K[a]] != K[a]), None))
    report.add("isotone", next(({"a": name(a), "b": name(b)}
                                for a in range(L.n) for b in range(L.n)
                                if L.leq(a, b) and not L.leq(K[a], K[b])), None))
    return report


@dataclass(frozen=True)
class ClosureSpace:
    """Ground set ``points`` with its family of closed sets (bitmasks).

    The closed family is stored canonically: deduplicated, ascending by mask.
    The empty set need not be closed.
    """

    points: tuple[str, ...]
    closed: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise StructureError("duplicate point names", "$.points")
        full = self.full
        for c in self.closed:
            if c & ~full:
                raise StructureError("closed set is not a subset of the points", "$.closed")
        object.__setattr__(self, "closed", tuple(sorted(set(self.closed))))

    @classmethod
    def from_names(cls, points: Sequence[str], closed: Iterable[Iterable[str]]) -> ClosureSpace:
        index = {p: i for i, p in enumerate(points)}
        masks = []
        for k, c in enumerate(closed):
            try:
                masks.append(mask_of(index[p] for p in c))
            except KeyError as exc:
                raise UnknownElementError(f"unknown point {exc.args[0]!r}", f"$.closed[{k}]") from None
        return cls(tuple(points), tuple(masks))

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def subset(self, names: Iterable[str]) -> int:
        index = {p: i for i, p in enumerate(self.points)}
        try:
            return mask_of(index[p] for p in names)
        except KeyError as exc:
            raise UnknownElementError(f"unknown point {exc.args[0]!r}") from None

    def names(self, mask: int) -> list[str]:
        return [self.points[i] for i in iter_bits(mask)]

    def closure(self, x: int) -> int:
        acc = self.full
        for c in self.closed:
            if x & ~c == 0:
                acc &= c
        return acc

    @cached_property
    def closure_table(self) -> tuple[int, ...]:
        """Closure of every subset; only for small ground sets."""
        check_points(self, DEFAULT_MAX_POINTS)
        return tuple(self.closure(x) for x in range(1 << self.size))


def check_points(X: ClosureSpace, max_points: int) -> None:
    if X.size > max_points:
        raise SizeCapError(f"closure space has {X.size} points, cap is {max_points}")


def space_closure(X: ClosureSpace, x: int) -> int:
    """Intersection of the closed supersets of ``x``; the whole ground set if there are none."""
    if x & ~X.full:
        raise StructureError("subset is not contained in the points")
    return X.closure(x)


def validate_closure_space(X: ClosureSpace) -> Report:
    report = Report("closure-space")
    closed = set(X.closed)
    report.add("contains-ground-set", None if X.full in closed else {"missing": X.names(X.full)})
    witness = None
    family = X.closed
    for i, c in enumerate(family):
        for d in family[i + 1:]:
            if c & d not in closed:
                witness = {"C": X.names(c), "D": X.names(d), "missing": X.names(c & d)}
                break
        if witness:
            break
    report.add("intersection-closed", witness)
    return report


class HasRelation(Protocol):
    lattice: FiniteJoinSemilattice

    def holds(self, a: int, mask: int) -> bool: ...


@dataclass(frozen=True)
class Homomorphism:
    source: SpecStructure
    target: SpecStructure
    mapping: tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.source.n:
            raise StructureError("map must be total on the source carrier", "$.map")
        for v in self.mapping:
            if not 0 <= v < self.target.n:
                raise UnknownElementError(f"image {v!r} is not a target element", "$.map")

    def __call__(self, a: int) -> int:
        return self.mapping[a]

    def image(self, mask: int) -> int:
        return mask_of(self.mapping[b] for b in iter_bits(mask))

    def named(self) -> dict[str, str]:
        s, t = self.source.lattice, self.target.lattice
        return {s.name(a): t.name(v) for a, v in enumerate(self.mapping)}


# Reflection is checked over all 2**n source rhs-sets.
EMBEDDING_CHECK_LIMIT = 14


def check_homomorphism(h: Homomorphism) -> Report:
    """Join and relation preservation; ``info['embedding']`` records embedding status."""
    S, T, f = h.source, h.target, h.mapping
    SL, TL = S.lattice, T.lattice
    report = Report("homomorphism")
    report.add("join", next(({"a": SL.name(a), "b": SL.name(b)}
                             for a in range(S.n) for b in range(S.n)
                             if f[SL.j(a, b)] != TL.j(f[a], f[b])), None))
    report.add("relation", _preservation_witness(h))
    if not report.ok:
        report.info["embedding"] = False
        return report
    injective = len(set(f)) == len(f)
    if not injective:
        report.info["embedding"] = False
        report.info["reason"] = "not injective"
    elif S.n > EMBEDDING_CHECK_LIMIT:
        report.info["embedding"] = None
        report.info["reason"] = "source too large to check reflection"
    else:
        bad_order = next(((a, b) for a in range(S.n) for b in range(S.n)
                          if TL.leq(f[a], f[b]) and not SL.leq(a, b)), None)
        bad_rel = next(((a, B) for a in range(S.n) for B in range(1, 1 << S.n)
                        if T.holds(f[a], h.image(B)) and not S.holds(a, B)), None)
        report.info["embedding"] = bad_order is None and bad_rel is None
        if bad_order is not None:
            report.info["reason"] = f"does not reflect order at {SL.name(bad_order[0])} <= {SL.name(bad_order[1])}"
        elif bad_rel is not None:
            report.info["reason"] = f"does not reflect relation at {S.pair_names(*bad_rel)}"
    return report


def _preservation_witness(h: Homomorphism) -> dict | None:
    S, T = h.source, h.target
    if isinstance(S.rel, SpecRelation):
        for a, B in S.rel.pairs():
            if not T.holds(h(a), h.image(B)):
                return S.pair_names(a, B)
        return None
    # Any a ⊑ B with image Z also satisfies a ⊑ preimage(Z) by M6, so checking
    # full preimages covers every instance.  Joins over subsets of the image
    # are built incrementally from the subset minus its lowest member.
    targets = sorted(set(h.mapping))
    groups = [mask_of(a for a in range(S.n) if h(a) == t) for t in targets]
    group_join = [S.rel.rhs_join(g) for g in groups]
    SJ, down = S.lattice.join, S.lattice.down
    monotone = all(T.lattice.leq(h(a), h(b)) for a in range(S.n) for b in iter_bits(S.lattice.up[a]))
    induced_target = monotone and isinstance(T.rel, InducedRelation)
    if induced_target:
        TJ, TK = T.lattice.join, T.rel.closure
    size = 1 << len(targets)
    sj, Ys, Zs, tj = [0] * size, [0] * size, [0] * size, [0] * size
    for code in range(1, size):
        low = code & -code
        i = low.bit_length() - 1
        rest = code ^ low
        Ys[code] = Ys[rest] | groups[i]
        Zs[code] = Zs[rest] | 1 << targets[i]
        sj[code] = SJ[sj[rest]][group_join[i]] if rest else group_join[i]
        v = sj[code]
        if induced_target:
            # target holds are down-closed and h is monotone: the top lhs decides
            tj[code] = TJ[tj[rest]][TK[targets[i]]] if rest else TK[targets[i]]
            if not T.lattice.leq(h(v), tj[code]):
                return S.pair_names(v, Ys[code])
            continue
        for a in iter_bits(down[v]):
            if not T.holds(h(a), Zs[code]):
                return S.pair_names(a, Ys[code])
    return None


def check_size(n: int, cap: int, what: str = "carrier") -> None:
    if n > cap:
        raise SizeCapError(f"{what} has {n} elements, cap is {cap}")
