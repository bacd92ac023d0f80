"""Exact computation with finite multi-argument specialization semilattices."""
from __future__ import annotations

from .axioms import (
    ClosureTable,
    check_axioms,
    check_derived_laws,
    check_regular,
    principal_closure_table,
    saturate,
)
from .errors import LiftError, SizeCapError, StructureError, UnknownElementError, ValidationError
from .extension import (
    FreeExtension,
    PairElement,
    audit_lemma_corre2,
    build_free_extension,
    lift_between_extensions,
    lift_homomorphism,
    pair_leq,
    unit_embedding,
)
from .io import load_structure, parse_structure, serialize_structure
from .lattice import FiniteJoinSemilattice, join_set, leq, validate_join_table
from .reports import Report, Verdict
from .representation import (
    SpaceEmbedding,
    embed_closure_semilattice,
    reduct_of_closure_semilattice,
    reduct_of_closure_space,
    represent,
    topo_gap_witness,
    topological_check,
)
from .search import (
    GenConfig,
    SplitMix64,
    enum_closure_systems,
    enum_homomorphisms,
    enum_join_semilattices,
    random_join_semilattice,
    random_spec_structure,
    search_witness,
)
from .structures import (
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

__version__ = "0.1.0"
