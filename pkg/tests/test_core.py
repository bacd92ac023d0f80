from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from oracles import naive_space_closure
from specsemi.errors import StructureError, UnknownElementError
from specsemi.lattice import FiniteJoinSemilattice, join_set, leq, validate_join_table
from specsemi.representation import powerset_lattice, reduct_of_closure_space
from specsemi.search import enum_closure_systems
from specsemi.structures import (
    ClosureSemilattice,
    ClosureSpace,
    Homomorphism,
    SpecRelation,
    SpecStructure,
    check_homomorphism,
    normalize_spec_relation,
    space_closure,
    validate_closure_semilattice,
    validate_closure_space,
)
from specsemi.suites import two_chain_total, witness, witness_lattice
from strategies import closure_semilattices, closure_spaces, lattices, spec_structures

ONE = FiniteJoinSemilattice.from_table(["e"], [[0]])
CHAIN = FiniteJoinSemilattice.chain(2)


class TestJoinTable:
    def test_one_element(self):
        assert validate_join_table(ONE).ok

    def test_chain(self):
        assert validate_join_table(CHAIN).ok
        assert CHAIN.j(0, 1) == 1

    def test_commutativity_violation(self):
        bad = FiniteJoinSemilattice.from_table(["0", "1"], [[0, 0], [1, 1]])
        report = validate_join_table(bad)
        assert not report.ok
        assert report.first_failure().law == "commutative"
        assert report.first_failure().witness == {"a": "0", "b": "1"}

    def test_wrong_arity_is_input_error(self):
        with pytest.raises(StructureError):
            FiniteJoinSemilattice.from_table(["0", "1"], [[0, 1]])
        with pytest.raises(UnknownElementError):
            FiniteJoinSemilattice.from_table(["0", "1"], [[0, 5], [1, 1]])

    def test_empty_carrier_rejected(self):
        with pytest.raises(StructureError):
            FiniteJoinSemilattice.from_table([], [])

    def test_leq_examples(self):
        assert leq(CHAIN, 0, 1)
        assert not leq(CHAIN, 1, 0)

    def test_join_set_examples(self):
        W = witness_lattice()
        assert join_set(ONE, [0]) == 0
        assert join_set(CHAIN, [0, 1]) == 1
        assert W.name(join_set(W, [W.index("b"), W.index("c")])) == "s"
        with pytest.raises(ValueError):
            join_set(CHAIN, [])

    @given(lattices())
    def test_order_is_partial_order(self, L):
        r = range(L.n)
        assert all(L.leq(a, a) for a in r)
        assert all(a == b for a in r for b in r if L.leq(a, b) and L.leq(b, a))
        assert all(L.leq(a, c) for a in r for b in r for c in r if L.leq(a, b) and L.leq(b, c))

    @given(lattices(), st.data())
    def test_join_set_is_any_fold(self, L, data):
        items = data.draw(st.lists(st.integers(0, L.n - 1), min_size=1, max_size=5))
        perm = data.draw(st.permutations(items))
        acc = perm[0]
        for x in perm[1:]:
            acc = L.j(acc, x)
        assert join_set(L, items) == acc


class TestNormalize:
    def test_permutation_collapses(self):
        W = witness_lattice()
        rel = normalize_spec_relation(W, [("a", ["b", "c"]), ("a", ["c", "b"])])
        assert list(rel.pairs()) == [(0, 0b110)]

    def test_duplicates_collapse(self):
        W = witness_lattice()
        assert list(normalize_spec_relation(W, [("a", ["b", "b"])]).pairs()) == [(0, 0b10)]

    def test_empty(self):
        assert len(normalize_spec_relation(CHAIN, [])) == 0

    def test_errors(self):
        with pytest.raises(StructureError):
            normalize_spec_relation(CHAIN, [("0", [])])
        with pytest.raises(UnknownElementError):
            normalize_spec_relation(CHAIN, [("0", ["9"])])

    @given(spec_structures(4))
    def test_idempotent(self, S):
        L = S.lattice
        once = S.explicit()
        named = [(L.name(a), L.names(B)) for a, B in once.pairs()]
        assert normalize_spec_relation(L, named) == once


class TestClosureSemilattice:
    def test_examples(self):
        assert validate_closure_semilattice(ClosureSemilattice(CHAIN, (1, 1))).ok
        assert validate_closure_semilattice(ClosureSemilattice(ONE, (0,))).ok
        report = validate_closure_semilattice(ClosureSemilattice(CHAIN, (0, 0)))
        assert report.first_failure().law == "extensive"
        assert report.first_failure().witness["a"] == "1"


class TestClosureSpace:
    def test_trivial_space_closes_empty_to_everything(self):
        X = ClosureSpace.from_names(["1", "2"], [["1", "2"]])
        assert space_closure(X, 0) == X.full

    def test_discrete(self):
        X = ClosureSpace(("1", "2", "3"), tuple(range(8)))
        assert all(space_closure(X, x) == x for x in range(8))

    def test_gap_space(self):
        X = ClosureSpace.from_names(["1", "2", "3"], [["1", "2", "3"], ["1"], ["2"], []])
        assert X.names(space_closure(X, X.subset(["1", "2"]))) == ["1", "2", "3"]
        assert validate_closure_space(X).ok

    def test_validation(self):
        assert validate_closure_space(ClosureSpace.from_names(["1"], [["1"]])).ok
        report = validate_closure_space(ClosureSpace.from_names(["1", "2"], [["1", "2"], ["1"], ["2"]]))
        assert report.first_failure().law == "intersection-closed"
        assert report.first_failure().witness["missing"] == []

    def test_subset_outside_points(self):
        X = ClosureSpace.from_names(["1"], [["1"]])
        with pytest.raises(StructureError):
            space_closure(X, 0b10)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_closure_laws_exhaustive(self, n):
        for X in enum_closure_systems(n):
            K = [X.closure(x) for x in range(1 << n)]
            for x in range(1 << n):
                assert x & ~K[x] == 0
                assert K[K[x]] == K[x]
            for x, y in itertools.product(range(1 << n), repeat=2):
                if x & ~y == 0:
                    assert K[x] & ~K[y] == 0

    @given(closure_spaces())
    def test_matches_naive_closure(self, X):
        closed = [X.names(c) for c in X.closed]
        for x in range(1 << X.size):
            assert set(X.names(X.closure(x))) == naive_space_closure(X.points, closed, X.names(x))


class TestHomomorphism:
    @given(spec_structures(4))
    def test_identity_is_embedding(self, S):
        report = check_homomorphism(Homomorphism(S, S, tuple(range(S.n))))
        assert report.ok and report.info["embedding"]

    def test_constant_to_top_of_reduct(self):
        X = ClosureSpace.from_names(["1", "2"], [["1", "2"], ["1"], []])
        T = reduct_of_closure_space(X)
        S = two_chain_total()
        report = check_homomorphism(Homomorphism(S, T, (3, 3)))
        assert report.ok
        assert not report.info["embedding"]

    def test_swap_breaks_join(self):
        S = two_chain_total()
        report = check_homomorphism(Homomorphism(S, S, (1, 0)))
        assert report.first_failure().law == "join"

    def test_non_total_map(self):
        S = two_chain_total()
        with pytest.raises(StructureError):
            Homomorphism(S, S, (0,))

    @given(spec_structures(3), spec_structures(3), st.data())
    def test_preimage_method_matches_direct(self, M, T, data):
        from specsemi.structures import InducedRelation
        from specsemi.axioms import principal_closure_table, check_regular

        mapping = tuple(data.draw(st.integers(0, T.n - 1)) for _ in range(M.n))
        direct = check_homomorphism(Homomorphism(M, T, mapping))
        table = principal_closure_table(M)
        if check_regular(M, table).ok:
            induced = SpecStructure(M.lattice, InducedRelation(M.lattice, table.k))
            via = check_homomorphism(Homomorphism(induced, T, mapping))
            assert via.ok == direct.ok


def test_relation_rejects_bad_shape():
    with pytest.raises(StructureError):
        SpecRelation(2, (0, 1))


def test_powerset_lattice_is_union():
    X = ClosureSpace.from_names(["p", "q"], [["p", "q"]])
    P = powerset_lattice(X)
    assert [P.j(1, 2), P.name(3)] == [3, "{p,q}"]


def test_witness_structure_shape():
    W = witness()
    assert W.elements == ("a", "b", "c", "s", "u")


@given(closure_semilattices(5), closure_semilattices(5), st.data())
def test_induced_target_shortcut_matches_direct(S, T, data):
    from specsemi.representation import reduct_of_closure_semilattice

    RS, RT = reduct_of_closure_semilattice(S), reduct_of_closure_semilattice(T)
    mapping = tuple(data.draw(st.integers(0, T.n - 1)) for _ in range(S.n))
    via = check_homomorphism(Homomorphism(RS, RT, mapping))
    direct = check_homomorphism(Homomorphism(RS.with_relation(RS.explicit()),
                                             RT.with_relation(RT.explicit()), mapping))
    assert via.verdict("relation").ok == direct.verdict("relation").ok
    assert via.info["embedding"] == direct.info["embedding"]
