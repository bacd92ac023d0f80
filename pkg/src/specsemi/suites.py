"""Named instances and the property suites run by ``specsemi verify``.

Every suite returns one Report with a verdict per case, in a fixed order.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from .axioms import check_axioms, check_derived_laws, check_regular, saturate
from .extension import audit_lemma_corre2, build_free_extension, lift_homomorphism
from .lattice import FiniteJoinSemilattice
from .reports import Report
from .representation import embed_closure_semilattice, represent
from .search import (
    GenConfig,
    enum_homomorphisms,
    enum_join_semilattices,
    all_saturated_relations,
    random_closure_semilattice,
    random_spec_structure,
)
from .structures import SpecRelation, SpecStructure

SUITES = ("axioms", "derived", "corre2", "universal", "emb", "corm")
DENSITIES = (0.0, 0.1, 0.5, 1.0)


def one_element() -> SpecStructure:
    L = FiniteJoinSemilattice.from_table(["e"], [[0]])
    return SpecStructure(L, SpecRelation.from_pairs(1, [(0, 1)]))


def two_chain_total() -> SpecStructure:
    L = FiniteJoinSemilattice.chain(2)
    return SpecStructure(L, SpecRelation.from_pairs(2, [(a, B) for a in range(2) for B in (1, 2, 3)]))


def witness_lattice() -> FiniteJoinSemilattice:
    """``b v c = s``; ``a`` joins everything else to the top ``u``."""
    return FiniteJoinSemilattice.from_order(
        "abcsu", {"a": "au", "b": "bsu", "c": "csu", "s": "su", "u": "u"})


def witness_seed() -> SpecStructure:
    L = witness_lattice()
    return SpecStructure(L, SpecRelation.from_pairs(5, [(0, 0b00110)]))


def witness() -> SpecStructure:
    """Saturation of ``a ⊑ {b, c}``: principal but not regular."""
    seed = witness_seed()
    return seed.with_relation(saturate(seed.lattice, seed.rel))


def named_instances() -> dict[str, SpecStructure]:
    return {"one-element": one_element(), "two-chain-total": two_chain_total(), "witness": witness()}


@dataclass(frozen=True)
class Case:
    label: str
    structure: SpecStructure


def random_cases(count: int = 200, size: int = 5, seed: int = 0) -> list[Case]:
    """Structure ``i`` uses seed ``seed + i`` and density ``DENSITIES[i % 4]``."""
    cases = []
    for i in range(count):
        d = DENSITIES[i % len(DENSITIES)]
        cases.append(Case(f"random-{seed + i}-d{d:g}", random_spec_structure(GenConfig(size, seed + i, d))))
    return cases


def exhaustive_cases(max_size: int) -> Iterator[Case]:
    for n in range(1, max_size + 1):
        for i, L in enumerate(enum_join_semilattices(n)):
            for j, rel in enumerate(all_saturated_relations(L)):
                yield Case(f"n{n}-L{i}-R{j}", SpecStructure(L, rel))


def named_cases() -> list[Case]:
    return [Case(k, v) for k, v in named_instances().items()]


def _run(subject: str, cases: Iterable[Case], check) -> Report:
    report = Report(subject)
    for case in cases:
        r = check(case.structure)
        bad = r.first_failure()
        report.add(case.label, None if bad is None else {"check": r.subject, "law": bad.law,
                                                         "witness": bad.witness})
    report.info["cases"] = len(report.verdicts)
    return report


def suite_axioms(cases: Iterable[Case]) -> Report:
    return _run("axioms", cases, check_axioms)


def suite_derived(cases: Iterable[Case]) -> Report:
    return _run("derived", cases, check_derived_laws)


def suite_corre2(cases: Iterable[Case]) -> Report:
    return _run("corre2", cases, audit_lemma_corre2)


def suite_corm(cases: Iterable[Case]) -> Report:
    return _run("corm", cases, lambda S: represent(S).report)


def suite_emb(count: int = 100, size: int = 6, seed: int = 0) -> Report:
    report = Report("emb")
    for i in range(count):
        S = random_closure_semilattice(GenConfig(size, seed + i))
        r = embed_closure_semilattice(S).report
        bad = r.first_failure()
        report.add(f"csl-{seed + i}", None if bad is None else {"law": bad.law, "witness": bad.witness})
    report.info["cases"] = count
    return report


def suite_universal(max_size: int = 3) -> Report:
    """Lift every homomorphism ``M -> T`` with ``T`` regular and check it is the unique one."""
    cases = list(exhaustive_cases(max_size))
    targets = [c for c in cases if check_regular(c.structure).ok]
    report = Report("universal")
    lifts = 0
    for m in cases:
        E = build_free_extension(m.structure)
        for t in targets:
            for eta in enum_homomorphisms(m.structure, t.structure):
                lifted = lift_homomorphism(m.structure, t.structure, eta, extension=E)
                lifts += 1
                bad = lifted.report.first_failure()
                if bad is not None:
                    report.add(f"{m.label}->{t.label}:{list(eta.mapping)}",
                               {"law": bad.law, "witness": bad.witness})
        report.add(m.label, None)
    report.info.update(sources=len(cases), targets=len(targets), lifts=lifts)
    return report


def default_cases(count: int = 200, size: int = 5, seed: int = 0) -> list[Case]:
    return random_cases(count, size, seed) + named_cases()
