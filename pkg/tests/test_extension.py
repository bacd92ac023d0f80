from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_pairs, naive_extension_classes, naive_pair_leq
from specsemi.axioms import check_axioms, check_regular
from specsemi.bits import mask_of
from specsemi.errors import LiftError, SizeCapError, ValidationError
from specsemi.extension import (
    PairElement,
    audit_lemma_corre2,
    build_free_extension,
    lift_between_extensions,
    lift_homomorphism,
    pair_leq,
    precedes_matrix,
    unit_embedding,
)
from specsemi.lattice import FiniteJoinSemilattice
from specsemi.representation import reduct_of_closure_semilattice
from specsemi.search import enum_homomorphisms
from specsemi.structures import ClosureSemilattice, Homomorphism, SpecRelation, SpecStructure, validate_closure_semilattice
from specsemi.suites import one_element, two_chain_total, witness, witness_seed
from strategies import spec_structures


class TestPairOrder:
    def test_one_element_examples(self):
        M = one_element()
        assert pair_leq(M, PairElement(0, 0), PairElement(0, 1))
        assert not pair_leq(M, PairElement(0, 1), PairElement(0, 0))

    @given(spec_structures(4))
    def test_reflexive(self, M):
        n = M.n
        assert all(pair_leq(M, PairElement(a, B), PairElement(a, B)) for a in range(n) for B in range(1 << n))

    @given(spec_structures(3))
    def test_matrix_matches_direct_and_naive(self, M):
        n = M.n
        mat = precedes_matrix(M)
        for p in range(n << n):
            for q in range(n << n):
                P = PairElement(p >> n, p & ((1 << n) - 1))
                Q = PairElement(q >> n, q & ((1 << n) - 1))
                direct = pair_leq(M, P, Q)
                naive = naive_pair_leq(M, (P.base, frozenset(i for i in range(n) if P.bag >> i & 1)),
                                       (Q.base, frozenset(i for i in range(n) if Q.bag >> i & 1)))
                assert bool(mat[p, q]) == direct == naive


class TestBuild:
    def test_one_element(self):
        E = build_free_extension(one_element())
        assert [E.label(c) for c in range(E.size)] == ["e", "e+K{e}"]
        assert E.lattice.leq(0, 1)
        assert E.k == (1, 1)
        assert E.unit_map == (0,)

    def test_two_chain_total(self):
        E = build_free_extension(two_chain_total())
        assert E.size == 3
        lo, hi = E.class_of(0, 0), E.class_of(1, 0)
        top = E.lattice.top
        assert E.lattice.leq(lo, hi) and lo != hi and hi != top
        assert E.k[lo] == E.k[hi] == top

    def test_rejects_non_axiomatic(self):
        with pytest.raises(ValidationError):
            build_free_extension(witness_seed())

    def test_size_cap(self):
        L = FiniteJoinSemilattice.chain(9)
        M = SpecStructure(L, SpecRelation.from_pairs(9, [(a, B) for a in range(9) for B in range(1, 512)
                                                         if L.leq(a, L.join_mask(B))]))
        with pytest.raises(SizeCapError):
            build_free_extension(M)

    @given(spec_structures(3))
    def test_classes_match_naive_quotient(self, M):
        E = build_free_extension(M)
        n = M.n
        got = {frozenset((pid >> n, frozenset(i for i in range(n) if pid >> i & 1)) for pid in group)
               for group in E.members}
        assert got == naive_extension_classes(M)

    @given(spec_structures(4))
    @settings(max_examples=30)
    def test_extension_is_principal_regular(self, M):
        E = build_free_extension(M)
        assert validate_closure_semilattice(E.closure_semilattice).ok
        assert check_axioms(E.structure).ok
        assert check_regular(E.structure).ok

    @given(spec_structures(4))
    @settings(max_examples=30)
    def test_representative_rules(self, M):
        E = build_free_extension(M)
        L, n = M.lattice, M.n
        for cls, group in enumerate(E.members):
            for pid in group:
                a, B = pid >> n, pid & ((1 << n) - 1)
                assert E.k[cls] == E.class_of(a, 1 << L.join_mask(B | 1 << a))
        for x in range(E.size):
            for y in range(E.size):
                p, q = E.representative(x), E.representative(y)
                assert E.lattice.j(x, y) == E.class_of(L.j(p.base, q.base), p.bag | q.bag)
                assert E.lattice.leq(x, y) == bool(E.precedes[E.members[x][0], E.members[y][0]])


class TestUnit:
    def test_one_element(self):
        checked = unit_embedding(build_free_extension(one_element()))
        assert checked.ok and checked.mapping == (0,)

    def test_witness_fact_preserved_and_reflected(self):
        M = witness()
        E = build_free_extension(M)
        u = E.unit_map
        idx = M.lattice.index
        assert E.structure.holds(u[idx("a")], 1 << u[idx("b")] | 1 << u[idx("c")])
        assert not E.structure.holds(u[idx("a")], 1 << u[idx("b")])
        assert unit_embedding(E).ok

    def test_chain_order(self):
        E = build_free_extension(two_chain_total())
        assert E.lattice.leq(E.unit_map[0], E.unit_map[1])
        assert not E.lattice.leq(E.unit_map[1], E.unit_map[0])

    @given(spec_structures(4))
    @settings(max_examples=30)
    def test_embedding(self, M):
        assert unit_embedding(build_free_extension(M)).ok


class TestLift:
    def target(self):
        return reduct_of_closure_semilattice(ClosureSemilattice(FiniteJoinSemilattice.chain(2), (1, 1)))

    def test_point_into_chain(self):
        M, T = one_element(), self.target()
        lifted = lift_homomorphism(M, T, Homomorphism(M, T, (0,)))
        assert lifted.ok
        assert lifted.mapping == (0, 1)

    def test_unit_lifts_to_identity(self):
        M = witness()
        E = build_free_extension(M)
        lifted = lift_homomorphism(M, E.structure, E.unit, extension=E)
        assert lifted.ok
        assert lifted.mapping == tuple(range(E.size))

    def test_non_regular_target_rejected(self):
        M, T = one_element(), witness()
        with pytest.raises(LiftError):
            lift_homomorphism(M, T, Homomorphism(M, T, (0,)))

    def test_bad_eta_rejected(self):
        M = two_chain_total()
        T = self.target()
        with pytest.raises(LiftError):
            lift_homomorphism(M, T, Homomorphism(M, T, (1, 0)))

    def test_between_identity(self):
        M = witness()
        lifted = lift_between_extensions(M, M, Homomorphism(M, M, tuple(range(M.n))))
        assert lifted.ok
        assert lifted.mapping == tuple(range(lifted.hom.source.n))

    def test_between_point_into_chain(self):
        M, U = one_element(), two_chain_total()
        EU = build_free_extension(U)
        lifted = lift_between_extensions(M, U, Homomorphism(M, U, (0,)), target_extension=EU)
        assert lifted.ok
        EM = build_free_extension(M)
        top = lifted.hom(EM.class_of(0, 1))
        assert top == EU.k[EU.class_of(0, 0)] == EU.lattice.top

    @given(spec_structures(3), spec_structures(3))
    @settings(max_examples=25)
    def test_square_commutes(self, M, U):
        for psi in enum_homomorphisms(M, U)[:4]:
            assert lift_between_extensions(M, U, psi, check_unique=False).report.verdict("square").ok


class TestAudit:
    @pytest.mark.parametrize("make", [one_element, two_chain_total, witness])
    def test_named(self, make):
        report = audit_lemma_corre2(make())
        assert report.ok, report.to_text()

    @given(spec_structures(4))
    @settings(max_examples=30)
    def test_random(self, M):
        assert audit_lemma_corre2(M).ok


def test_pair_count_bound():
    M = witness()
    E = build_free_extension(M)
    assert sum(len(g) for g in E.members) == M.n << M.n == len(all_pairs(M.n))
    assert mask_of([]) == 0
