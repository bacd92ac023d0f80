"""Axioms M1-M7, their derived consequences, Horn saturation, closures and regularity.

Witnesses are chosen deterministically: among all violating instances, the one
whose failing conclusion ``(lhs, rhs)`` is least in (lhs index, rhs bitmask)
order, ties broken by the remaining parameters.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .bits import iter_bits, lowest
from .lattice import FiniteJoinSemilattice
from .reports import Report
from .structures import (
    ClosureSemilattice,
    InducedRelation,
    SpecRelation,
    SpecStructure,
    check_size,
    validate_closure_semilattice,
)

AXIOMS = ("M1", "M2", "M3", "M4", "M5", "M6", "M7")
DERIVED_LAWS = ("M1+", "M2-", "M2*", "M2+", "pupb", "M8", "M9", "M6+")
# Induced relations above this size are checked by quantifying over rhs joins.
MATERIALIZE_LIMIT = 8


def _first(candidates):
    best = None
    for c in candidates:
        if best is None or c < best:
            best = c
    return best


def check_axioms(S: SpecStructure) -> Report:
    if isinstance(S.rel, InducedRelation) and S.n > MATERIALIZE_LIMIT:
        return _induced_axioms(S)
    return _explicit_axioms(S.lattice, S.explicit())


def _explicit_axioms(L: FiniteJoinSemilattice, rel: SpecRelation) -> Report:
    n, lhs, down, J = L.n, rel.lhs, L.down, L.join
    name, names = L.name, L.names
    report = Report("axioms", info={"method": "exhaustive"})

    bad = _first(a for a in range(n) if not lhs[1 << a] >> a & 1)
    report.add("M1", None if bad is None else {"lhs": name(bad), "rhs": [name(bad)]})

    def m2():
        for B in range(1, 1 << n):
            if not lhs[B]:
                continue
            for b in iter_bits(B):
                rest = B & ~(1 << b)
                for c in range(n):
                    if lhs[1 << c] >> b & 1:
                        B2 = rest | 1 << c
                        missing = lhs[B] & ~lhs[B2]
                        if missing:
                            yield lowest(missing), B2, B, b, c

    w = _first(m2())
    report.add("M2", None if w is None else {
        "lhs": name(w[0]), "rhs": names(w[1]), "premise_rhs": names(w[2]),
        "replaced": name(w[3]), "by": name(w[4])})

    def m3():
        for C in range(1, 1 << n):
            for b in iter_bits(lhs[C]):
                missing = down[b] & ~lhs[C]
                if missing:
                    yield lowest(missing), C, b

    w = _first(m3())
    report.add("M3", None if w is None else {"lhs": name(w[0]), "rhs": names(w[1]), "above": name(w[2])})
    # permutation and duplicate absorption hold for set-valued right-hand sides
    report.add("M4", None)
    report.add("M5", None)

    def m6():
        for B in range(1, 1 << n):
            for x in range(n):
                missing = lhs[B] & ~lhs[B | 1 << x]
                if missing:
                    yield lowest(missing), B | 1 << x, B, x

    w = _first(m6())
    report.add("M6", None if w is None else {"lhs": name(w[0]), "rhs": names(w[1]), "premise_rhs": names(w[2])})

    def m7():
        for B in range(1, 1 << n):
            members = list(iter_bits(lhs[B]))
            for a in members:
                for a1 in members:
                    if not lhs[B] >> J[a][a1] & 1:
                        yield J[a][a1], B, a, a1

    w = _first(m7())
    report.add("M7", None if w is None else {"lhs": name(w[0]), "rhs": names(w[1]),
                                             "a": name(w[2]), "a1": name(w[3])})
    return report


def rhs_join_values(L: FiniteJoinSemilattice, closure: tuple[int, ...]) -> list[int]:
    """All joins of nonempty sets of closure values, ascending by index."""
    values = set(closure)
    frontier = list(values)
    while frontier:
        v = frontier.pop()
        for w in list(values):
            u = L.j(v, w)
            if u not in values:
                values.add(u)
                frontier.append(u)
    return sorted(values)


def _induced_axioms(S: SpecStructure) -> Report:
    """Axioms for ``a ⊑ B iff a <= J(B)``, ``J(B) = Kb1 v ... v Kbn``.

    ``a ⊑ B`` depends on ``B`` only through ``J(B)``, and every instance of M2
    has ``J(B) = v v Kb`` and ``J(B') = v v Kc`` with ``v = J(B - {b})`` (or
    nothing).  Quantifying over the finite set of such ``v`` covers every
    instance exactly.
    """
    L, K = S.lattice, S.rel.closure
    n, J, leq, name = L.n, L.join, L.leq, L.name
    values = rhs_join_values(L, K)
    report = Report("axioms", info={"method": "rhs-join", "rhs_joins": len(values)})

    def jv(v, x):
        return x if v is None else J[v][x]

    report.add("M1", next(({"lhs": name(a), "rhs": [name(a)]} for a in range(n) if not leq(a, K[a])), None))
    report.add("M2", next(({"rhs_rest_join": None if v is None else name(v), "replaced": name(b), "by": name(c)}
                           for v in [None, *values] for b in range(n) for c in range(n)
                           if leq(b, K[c]) and not leq(jv(v, K[b]), jv(v, K[c]))), None))
    report.add("M3", next(({"lhs": name(a), "above": name(b), "rhs_join": name(v)}
                           for v in values for b in range(n) for a in range(n)
                           if leq(b, v) and leq(a, b) and not leq(a, v)), None))
    report.add("M4", None)
    report.add("M5", None)
    report.add("M6", next(({"rhs_join": name(v), "added": name(x)}
                           for v in values for x in range(n) if not leq(v, J[v][K[x]])), None))
    report.add("M7", next(({"a": name(a), "a1": name(a1), "rhs_join": name(v)}
                           for v in values for a in range(n) for a1 in range(n)
                           if leq(a, v) and leq(a1, v) and not leq(J[a][a1], v)), None))
    return report


def _image_masks(B: int, targets: list[int]) -> set[int]:
    """All ``f[B]`` for maps with ``f(b)`` in ``targets[b]`` (bitmask of allowed values)."""
    images = {0}
    for b in iter_bits(B):
        images = {m | 1 << c for m in images for c in iter_bits(targets[b])}
    return images


def check_derived_laws(S: SpecStructure) -> Report:
    L = S.lattice
    rel = S.explicit()
    n, lhs, down, leq = L.n, rel.lhs, L.down, L.leq
    name, names = L.name, L.names
    full = (1 << n) - 1
    report = Report("derived-laws")
    single = [lhs[1 << x] for x in range(n)]
    # specializes_to[b] = bitmask of c with b ⊑ c
    specializes_to = [sum(1 << c for c in range(n) if single[c] >> b & 1) for b in range(n)]

    w = _first((lowest(down[b] & ~single[b]), b) for b in range(n) if down[b] & ~single[b])
    report.add("M1+", None if w is None else {"lhs": name(w[0]), "rhs": [name(w[1])]})

    w = _first((lowest(single[b] & ~single[c]), c, b) for b in range(n) for c in iter_bits(specializes_to[b])
               if single[b] & ~single[c])
    report.add("M2-", None if w is None else {"lhs": name(w[0]), "rhs": [name(w[1])], "via": name(w[2])})

    w = _first((lowest(single[b] & ~single[c]), c, b) for b in range(n) for c in range(n)
               if leq(b, c) and single[b] & ~single[c])
    report.add("M2*", None if w is None else {"lhs": name(w[0]), "rhs": [name(w[1])], "via": name(w[2])})

    def m2plus():
        for B in range(1, 1 << n):
            if not lhs[B]:
                continue
            for C in _image_masks(B, specializes_to):
                missing = lhs[B] & ~lhs[C]
                if missing:
                    yield lowest(missing), C, B

    w = _first(m2plus())
    report.add("M2+", None if w is None else {"lhs": name(w[0]), "rhs": names(w[1]), "premise_rhs": names(w[2])})

    joins = [None] + [L.join_mask(C) for C in range(1, 1 << n)]
    w = _first((joins[C], C) for C in range(1, 1 << n) if not lhs[C] >> joins[C] & 1)
    report.add("pupb", None if w is None else {"lhs": name(w[0]), "rhs": names(w[1])})

    w = _first((lowest(down[joins[C]] & ~lhs[C]), C) for C in range(1, 1 << n) if down[joins[C]] & ~lhs[C])
    report.add("M8", None if w is None else {"lhs": name(w[0]), "rhs": names(w[1])})

    w = _first((lowest(lhs[C] & ~single[joins[C]]), joins[C], C) for C in range(1, 1 << n)
               if lhs[C] & ~single[joins[C]])
    report.add("M9", None if w is None else {"lhs": name(w[0]), "rhs": [name(w[1])], "premise_rhs": names(w[2])})

    def m6plus():
        for B in range(1, 1 << n):
            if not lhs[B]:
                continue
            rest = full & ~B
            extra = rest
            while True:
                B1 = B | extra
                missing = lhs[B] & ~lhs[B1]
                if missing:
                    yield lowest(missing), B1, B
                if not extra:
                    break
                extra = (extra - 1) & rest

    w = _first(m6plus())
    report.add("M6+", None if w is None else {"lhs": name(w[0]), "rhs": names(w[1]), "premise_rhs": names(w[2])})
    return report


def _ideal_closure(L: FiniteJoinSemilattice, m: int) -> int:
    """Smallest down-closed, join-closed set containing ``m`` (rules M3 and M7 for one rhs)."""
    down, J = L.down, L.join
    while True:
        grown = m
        for a in iter_bits(m):
            grown |= down[a]
        members = list(iter_bits(grown))
        for a in members:
            for b in members:
                grown |= 1 << J[a][b]
        if grown == m:
            return m
        m = grown


def saturate(lattice: FiniteJoinSemilattice, seed: SpecRelation, max_elements: int = 12) -> SpecRelation:
    """Least relation containing ``seed`` and M1, closed under M2, M3, M6, M7.

    Worklist over right-hand sides whose lhs-set grew.  When a singleton
    ``{c}`` grows, every rhs containing a newly specialized ``b`` is revisited
    so that M2 sees the new premise.
    """
    check_size(lattice.n, max_elements)
    n = lattice.n
    if seed.n != n:
        raise ValueError("seed relation is over a different carrier")
    lhs = list(seed.lhs)
    for x in range(n):
        lhs[1 << x] |= 1 << x
    queued = [False] * (1 << n)
    # lhs-set of each singleton as of its last visit
    seen = [0] * n
    work = deque()

    def push(T):
        if not queued[T]:
            queued[T] = True
            work.append(T)

    def add(T, m):
        if m & ~lhs[T]:
            lhs[T] |= m
            push(T)

    for B in range(1, 1 << n):
        if lhs[B]:
            push(B)
    while work:
        B = work.popleft()
        queued[B] = False
        m = _ideal_closure(lattice, lhs[B])
        lhs[B] = m
        for x in range(n):
            if not B >> x & 1:
                add(B | 1 << x, m)
        for b in iter_bits(B):
            rest = B & ~(1 << b)
            for c in range(n):
                if lhs[1 << c] >> b & 1:
                    add(rest | 1 << c, m)
        if B & (B - 1) == 0:
            c = lowest(B)
            fresh = m & ~seen[c]
            seen[c] = m
            if fresh:
                for D in range(1, 1 << n):
                    if D & fresh and lhs[D]:
                        push(D)
    return SpecRelation(n, tuple(lhs))


@dataclass(frozen=True)
class ClosureTable:
    """``k[x]`` is the join of everything specializing to ``x``."""

    k: tuple[int, ...]
    principal: bool
    offending: int | None
    laws: Report

    def as_closure_semilattice(self, lattice: FiniteJoinSemilattice) -> ClosureSemilattice:
        return ClosureSemilattice(lattice, self.k)


def principal_closure_table(S: SpecStructure) -> ClosureTable:
    L = S.lattice
    k = []
    for x in range(S.n):
        below = [y for y in range(S.n) if S.holds(y, 1 << x)]
        # M1 gives x ⊑ x; an empty set means the relation is not reflexive
        k.append(L.join_set(below) if below else x)
    offending = next((x for x in range(S.n) if not S.holds(k[x], 1 << x)), None)
    laws = validate_closure_semilattice(ClosureSemilattice(L, tuple(k)))
    return ClosureTable(tuple(k), offending is None, offending, laws)


REGULAR_EXHAUSTIVE_LIMIT = 12


def check_regular(S: SpecStructure, table: ClosureTable | None = None) -> Report:
    """``a ⊑ B`` iff ``a <= Kb1 v ... v Kbn`` for every ``(a, B)``.

    The "if" direction holds in every principal structure; it is checked too
    and a failure there signals a broken structure rather than irregularity.
    """
    table = table or principal_closure_table(S)
    L = S.lattice
    report = Report("regular")
    report.add("principal", None if table.principal else {"x": L.name(table.offending)})
    if not table.principal:
        return report
    report.info["K"] = {L.name(x): L.name(table.k[x]) for x in range(S.n)}
    closed = InducedRelation(L, table.k)
    if isinstance(S.rel, InducedRelation) and S.n > REGULAR_EXHAUSTIVE_LIMIT:
        same = S.rel.closure == table.k
        report.info["method"] = "closure-table"
        report.add("if", None if same else {"reason": "principal closure differs from the defining closure"})
        report.add("only-if", None if same else {"reason": "principal closure differs from the defining closure"})
        return report
    report.info["method"] = "exhaustive"
    if_fail = only_if_fail = None
    for a in range(S.n):
        for B in range(1, 1 << S.n):
            held, bound = S.holds(a, B), closed.holds(a, B)
            if bound and not held and if_fail is None:
                if_fail = S.pair_names(a, B)
            if held and not bound and only_if_fail is None:
                only_if_fail = dict(S.pair_names(a, B), closure_join=L.name(closed.rhs_join(B)))
    report.add("if", if_fail)
    report.add("only-if", only_if_fail)
    return report
