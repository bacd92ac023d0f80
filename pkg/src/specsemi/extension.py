"""Free principal extension of a multi-argument specialization semilattice.

A pair ``(a, B)`` with ``B`` a finite subset of the carrier stands for
``a v Kb1 v ... v Kbh`` where the ``Kb`` are fresh closures.  Pairs are
preordered, the preorder is quotiented by its strongly connected components,
and the quotient carries a join, a closure and the induced relations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .axioms import check_axioms, check_regular, principal_closure_table
from .bits import iter_bits, mask_of
from .errors import LiftError, ValidationError
from .lattice import FiniteJoinSemilattice
from .reports import Report
from .structures import (
    ClosureSemilattice,
    Homomorphism,
    InducedRelation,
    SpecStructure,
    check_homomorphism,
    check_size,
)

DEFAULT_MAX_PARENT = 8


@dataclass(frozen=True)
class PairElement:
    base: int
    bag: int


def pair_label(L: FiniteJoinSemilattice, base: int, bag: int) -> str:
    """``a`` for ``(a, {})``, ``a+K{b,c}`` for ``(a, {b, c})``."""
    if not bag:
        return L.name(base)
    return f"{L.name(base)}+K{{{','.join(L.names(bag))}}}"


def pair_leq(M: SpecStructure, p: PairElement, q: PairElement) -> bool:
    """Direct evaluation of the pair preorder.

    (a1) some ``d ⊑ q.bag`` has ``p.base <= q.base v d`` (just ``p.base <= q.base``
    when ``q.bag`` is empty); (a2) each ``b`` in ``p.bag`` specializes to some
    member of ``q.bag``.
    """
    L = M.lattice
    if q.bag == 0:
        first = L.leq(p.base, q.base)
    else:
        first = any(M.holds(d, q.bag) and L.leq(p.base, L.j(q.base, d)) for d in range(M.n))
    if not first:
        return False
    return all(any(M.holds(b, 1 << d) for d in iter_bits(q.bag)) for b in iter_bits(p.bag))


def precedes_matrix(M: SpecStructure) -> np.ndarray:
    """Boolean matrix of the pair preorder over all pairs, indexed by ``base << n | bag``."""
    L, n = M.lattice, M.n
    full = 1 << n
    lhs = [0] + [mask_of(d for d in range(n) if M.holds(d, Q)) for Q in range(1, full)]
    # first[c][Q]: bases a passing (a1) against (c, Q), found by scanning every d
    first = np.zeros((n, full), dtype=np.int64)
    for c in range(n):
        first[c, 0] = L.down[c]
        for Q in range(1, full):
            acc = 0
            for d in iter_bits(lhs[Q]):
                acc |= L.down[L.j(c, d)]
            first[c, Q] = acc
    # cover[Q]: elements specializing to some member of Q
    cover = np.zeros(full, dtype=np.int64)
    for Q in range(full):
        acc = 0
        for d in iter_bits(Q):
            acc |= lhs[1 << d]
        cover[Q] = acc
    base = np.repeat(np.arange(n, dtype=np.int64), full)
    bag = np.tile(np.arange(full, dtype=np.int64), n)
    a1 = ((first[base, bag][None, :] >> base[:, None]) & 1).astype(bool)
    a2 = (bag[:, None] & ~cover[bag][None, :]) == 0
    return a1 & a2


@dataclass(frozen=True, eq=False)
class FreeExtension:
    parent: SpecStructure
    precedes: np.ndarray = field(repr=False)
    pair_class: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]
    closure_semilattice: ClosureSemilattice
    structure: SpecStructure
    unit_map: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def lattice(self) -> FiniteJoinSemilattice:
        return self.closure_semilattice.lattice

    @property
    def k(self) -> tuple[int, ...]:
        return self.closure_semilattice.k

    def pair(self, pid: int) -> PairElement:
        return PairElement(pid >> self.parent.n, pid & ((1 << self.parent.n) - 1))

    def pid(self, base: int, bag: int) -> int:
        return base << self.parent.n | bag

    def class_of(self, base: int, bag: int) -> int:
        return self.pair_class[self.pid(base, bag)]

    def representative(self, cls: int) -> PairElement:
        return self.pair(self.members[cls][0])

    def label(self, cls: int) -> str:
        return self.lattice.name(cls)

    def pair_name(self, pid: int) -> str:
        p = self.pair(pid)
        return pair_label(self.parent.lattice, p.base, p.bag)

    @cached_property
    def unit(self) -> Homomorphism:
        return Homomorphism(self.parent, self.structure, self.unit_map)


def build_free_extension(M: SpecStructure, max_elements: int = DEFAULT_MAX_PARENT) -> FreeExtension:
    check_size(M.n, max_elements)
    axioms = check_axioms(M)
    if not axioms.ok:
        raise ValidationError(axioms)
    n, L = M.n, M.lattice
    full = 1 << n
    leq = precedes_matrix(M)
    _, labels = connected_components(csr_matrix(leq), directed=True, connection="strong")
    # classes numbered by their least member, i.e. least (base, bag)
    first_seen: dict[int, int] = {}
    for pid, lab in enumerate(labels):
        first_seen.setdefault(int(lab), len(first_seen))
    pair_class = tuple(first_seen[int(lab)] for lab in labels)
    groups: list[list[int]] = [[] for _ in first_seen]
    for pid, cls in enumerate(pair_class):
        groups[cls].append(pid)
    members = tuple(tuple(g) for g in groups)
    reps = [(g[0] >> n, g[0] & (full - 1)) for g in members]

    def cls_of(base, bag):
        return pair_class[base << n | bag]

    size = len(members)
    join = [[cls_of(L.j(reps[x][0], reps[y][0]), reps[x][1] | reps[y][1]) for y in range(size)]
            for x in range(size)]
    k = []
    for a, B in reps:
        k.append(cls_of(a, 1 << L.join_mask(B | 1 << a)))
    names = [pair_label(L, a, B) for a, B in reps]
    lattice = FiniteJoinSemilattice.from_table(names, join)
    csl = ClosureSemilattice(lattice, tuple(k))
    structure = SpecStructure(lattice, InducedRelation(lattice, tuple(k)))
    leq.setflags(write=False)
    return FreeExtension(M, leq, pair_class, members, csl, structure,
                         tuple(cls_of(a, 0) for a in range(n)))


@dataclass(frozen=True)
class CheckedMap:
    """A map together with the report of its verification."""

    hom: Homomorphism
    report: Report

    @property
    def ok(self) -> bool:
        return self.report.ok

    @property
    def mapping(self) -> tuple[int, ...]:
        return self.hom.mapping


def unit_embedding(E: FreeExtension) -> CheckedMap:
    report = check_homomorphism(E.unit)
    report.subject = "unit-embedding"
    report.add("embedding", None if report.info.get("embedding") else
               {"reason": report.info.get("reason", "not an embedding")})
    return CheckedMap(E.unit, report)


def check_k_preserving(mapping, source: ClosureSemilattice, target_k) -> dict | None:
    for x in range(source.n):
        if mapping[source.k[x]] != target_k[mapping[x]]:
            return {"x": source.lattice.name(x)}
    return None


def _generation_order(csl: ClosureSemilattice, start: list[int]) -> list[int]:
    """Classes reachable from ``start`` by closure and join, in discovery order."""
    order = list(dict.fromkeys(start))
    seen = set(order)
    J, K = csl.lattice.join, csl.k
    changed = True
    while changed:
        changed = False
        for x in list(order):
            if K[x] not in seen:
                seen.add(K[x])
                order.append(K[x])
                changed = True
        for x in list(order):
            for y in list(order):
                z = J[x][y]
                if z not in seen:
                    seen.add(z)
                    order.append(z)
                    changed = True
    order.extend(x for x in range(csl.n) if x not in seen)
    return order


def commuting_k_homomorphisms(source: ClosureSemilattice, target_lattice: FiniteJoinSemilattice,
                              target_k, fixed: dict[int, int]) -> list[tuple[int, ...]]:
    """Every join- and closure-preserving map agreeing with ``fixed``, by backtracking.

    Classes are visited in generation order from the fixed ones, so partial
    assignments are pruned as soon as a join or closure constraint closes.
    """
    n, m = source.n, target_lattice.n
    J, K = source.lattice.join, source.k
    TJ = target_lattice.join
    order = _generation_order(source, sorted(fixed))
    joins_into: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for y in range(n):
        for w in range(y, n):
            joins_into[J[y][w]].append((y, w))
    k_into: list[list[int]] = [[] for _ in range(n)]
    for y in range(n):
        k_into[K[y]].append(y)
    f: list[int | None] = [None] * n
    found: list[tuple[int, ...]] = []

    def consistent(x: int) -> bool:
        t = f[x]
        if f[K[x]] is not None and f[K[x]] != target_k[t]:
            return False
        for y in k_into[x]:
            if f[y] is not None and t != target_k[f[y]]:
                return False
        for y in range(n):
            if f[y] is not None:
                z = J[x][y]
                if f[z] is not None and f[z] != TJ[t][f[y]]:
                    return False
        for y, w in joins_into[x]:
            if f[y] is not None and f[w] is not None and t != TJ[f[y]][f[w]]:
                return False
        return True

    def extend(i: int) -> None:
        if i == n:
            found.append(tuple(f))
            return
        x = order[i]
        for t in ([fixed[x]] if x in fixed else range(m)):
            f[x] = t
            if consistent(x):
                extend(i + 1)
            f[x] = None

    extend(0)
    return found


def lift_homomorphism(M: SpecStructure, T: SpecStructure, eta: Homomorphism,
                      extension: FreeExtension | None = None, check_unique: bool = True) -> CheckedMap:
    """The unique closure-preserving map from the extension of ``M`` to ``T`` extending ``eta``.

    Each class ``[a, {b1..bh}]`` goes to ``eta(a) v K eta(b1) v ... v K eta(bh)``.
    """
    table = principal_closure_table(T)
    regular = check_regular(T, table)
    if not regular.ok:
        raise LiftError(f"target is not principal regular: {regular.summary()}")
    eta_report = check_homomorphism(eta)
    if not eta_report.ok:
        raise LiftError(f"eta is not a homomorphism: {eta_report.summary()}")
    if eta.source.lattice != M.lattice:
        raise LiftError("eta is not defined on M")
    E = extension or build_free_extension(M)
    TL, TK = T.lattice, table.k
    n = M.n

    def value(pid):
        p = E.pair(pid)
        acc = eta(p.base)
        for b in iter_bits(p.bag):
            acc = TL.j(acc, TK[eta(b)])
        return acc

    report = Report("lift")
    mapping = []
    bad = None
    for cls, group in enumerate(E.members):
        vals = {value(pid) for pid in group}
        if len(vals) > 1 and bad is None:
            bad = {"class": E.label(cls), "values": sorted(TL.name(v) for v in vals)}
        mapping.append(value(group[0]))
    report.add("well-defined", bad)
    lifted = Homomorphism(E.structure, T, tuple(mapping))
    hom_report = check_homomorphism(lifted)
    report.add("join", hom_report.verdict("join").witness)
    report.add("relation", hom_report.verdict("relation").witness)
    report.add("K", check_k_preserving(lifted.mapping, E.closure_semilattice, TK))
    report.add("commutes", next(({"a": M.lattice.name(a)} for a in range(n)
                                 if lifted(E.unit_map[a]) != eta(a)), None))
    if check_unique:
        fixed = {E.unit_map[a]: eta(a) for a in range(n)}
        candidates = commuting_k_homomorphisms(E.closure_semilattice, TL, TK, fixed)
        report.info["candidates"] = len(candidates)
        others = [c for c in candidates if c != lifted.mapping]
        report.add("unique", None if not others and candidates == [lifted.mapping] else
                   {"alternatives": len(others), "found_lift": lifted.mapping in candidates})
    return CheckedMap(lifted, report)


def lift_between_extensions(M: SpecStructure, U: SpecStructure, psi: Homomorphism,
                            extension: FreeExtension | None = None,
                            target_extension: FreeExtension | None = None,
                            check_unique: bool = True) -> CheckedMap:
    """Closure-preserving map between extensions making the unit square commute."""
    psi_report = check_homomorphism(psi)
    if not psi_report.ok:
        raise LiftError(f"psi is not a homomorphism: {psi_report.summary()}")
    EM = extension or build_free_extension(M)
    EU = target_extension or build_free_extension(U)
    eta = Homomorphism(M, EU.structure, tuple(EU.unit_map[psi(a)] for a in range(M.n)))
    lifted = lift_homomorphism(M, EU.structure, eta, extension=EM, check_unique=check_unique)
    report = lifted.report
    report.subject = "lift-between"
    report.add("square", next(({"a": M.lattice.name(a)} for a in range(M.n)
                               if lifted.hom(EM.unit_map[a]) != EU.unit_map[psi(a)]), None))
    return CheckedMap(lifted.hom, report)


def audit_lemma_corre2(M: SpecStructure, extension: FreeExtension | None = None) -> Report:
    """Exhaustive audit of the pair preorder and its quotient over all pairs.

    Checks reflexivity and transitivity, the collapse to singleton bags, that
    mutual precedence is a congruence for the componentwise join, that class
    joins computed from any representatives agree, that the closure is
    well defined on classes, and that class order coincides with the preorder.
    """
    E = extension or build_free_extension(M)
    n, L = M.n, M.lattice
    full = 1 << n
    P = n * full
    leq = E.precedes
    report = Report("lemma-corre2", info={"pairs": P, "classes": E.size})

    def pn(pid):
        return E.pair_name(int(pid))

    diag = np.flatnonzero(~np.diag(leq))
    report.add("reflexive", None if diag.size == 0 else {"p": pn(diag[0])})

    f = leq.astype(np.float32)
    trans = (f @ f > 0) & ~leq
    report.add("transitive", _pair_witness(trans, leq, pn, three=True))

    base = np.repeat(np.arange(n), full)
    bag = np.tile(np.arange(full), n)
    collapsed = np.array([(a << n) | (1 << L.join_mask(B | 1 << a)) for a, B in zip(base.tolist(), bag.tolist())])
    mum = leq & ~leq[np.ix_(collapsed, collapsed)]
    report.add("collapse", _pair_witness(mum, leq, pn))

    J = np.array(L.join)
    cong = None
    for r in range(P):
        rb, rB = r >> n, r & (full - 1)
        joined = (J[base, rb] << n) | (bag | rB)
        bad = leq & ~leq[np.ix_(joined, joined)]
        if bad.any():
            p, q = np.argwhere(bad)[0]
            cong = {"p": pn(p), "q": pn(q), "r": pn(r)}
            break
    report.add("congruence", cong)

    pc = np.array(E.pair_class)
    CJ = np.array(E.lattice.join)
    rep_join = None
    for p in range(P):
        joined = (J[base[p], base] << n) | (bag[p] | bag)
        bad = np.flatnonzero(pc[joined] != CJ[pc[p], pc])
        if bad.size:
            rep_join = {"p": pn(p), "q": pn(bad[0])}
            break
    report.add("join-representatives", rep_join)

    K = np.array(E.k)
    kbad = np.flatnonzero(pc[collapsed] != K[pc])
    report.add("K-well-defined", None if kbad.size == 0 else {"p": pn(kbad[0])})

    class_leq = CJ[pc][:, pc] == pc[None, :]
    order_bad = np.argwhere(class_leq != leq)
    report.add("order", None if order_bad.size == 0 else
               {"p": pn(order_bad[0][0]), "q": pn(order_bad[0][1])})
    return report


def _pair_witness(bad: np.ndarray, leq: np.ndarray, pn, three: bool = False) -> dict | None:
    hits = np.argwhere(bad)
    if hits.size == 0:
        return None
    p, q = hits[0]
    out = {"p": pn(p), "q": pn(q)}
    if three:
        mids = np.flatnonzero(leq[p] & leq[:, q])
        out["via"] = pn(mids[0])
    return out
