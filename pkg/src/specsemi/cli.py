"""Command-line interface.

Exit codes: 0 success, 1 a checked property failed (the failing report is
printed with its witness as JSON), 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import io
from .axioms import check_axioms, check_regular, saturate
from .errors import LiftError, SizeCapError, StructureError, ValidationError
from .extension import (
    DEFAULT_MAX_PARENT,
    build_free_extension,
    lift_between_extensions,
    lift_homomorphism,
    unit_embedding,
)
from .reports import Report
from .representation import (
    DEFAULT_MAX_GROUND,
    embed_closure_semilattice,
    reduct_of_closure_semilattice,
    reduct_of_closure_space,
    represent,
    topo_gap_witness,
    topological_check,
)
from .search import PREDICATES, GenConfig, random_closure_semilattice, random_spec_structure, search_witness
from .structures import (
    DEFAULT_MAX_ELEMENTS,
    DEFAULT_MAX_POINTS,
    ClosureSemilattice,
    ClosureSpace,
    Homomorphism,
    SpecStructure,
    check_homomorphism,
    check_points,
    check_size,
    validate_closure_semilattice,
    validate_closure_space,
)
from . import suites

ENV_MAX_ELEMENTS = "SPECSEMI_MAX_ELEMENTS"
ENV_MAX_POINTS = "SPECSEMI_MAX_POINTS"
ENV_MAX_EXTEND = "SPECSEMI_MAX_EXTEND"


class UsageError(Exception):
    pass


def _env_int(var: str, default: int) -> int:
    raw = os.environ.get(var)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{var} must be an integer, got {raw!r}") from None


def _max_elements(args, verb_default: int | None = None) -> int:
    if args.max_elements is not None:
        return args.max_elements
    if verb_default is not None:
        return _env_int(ENV_MAX_EXTEND, verb_default)
    return _env_int(ENV_MAX_ELEMENTS, DEFAULT_MAX_ELEMENTS)


def _max_points(args) -> int:
    return args.max_points if args.max_points is not None else _env_int(ENV_MAX_POINTS, DEFAULT_MAX_POINTS)


def _load(path: str, args, *kinds: type):
    obj = io.load_structure(path)
    if kinds and not isinstance(obj, kinds):
        wanted = ", ".join(k.__name__ for k in kinds)
        raise StructureError(f"expected {wanted}, got {type(obj).__name__}", path)
    if isinstance(obj, (SpecStructure, ClosureSemilattice)):
        check_size(obj.n, _max_elements(args))
    elif isinstance(obj, ClosureSpace):
        check_points(obj, _max_points(args))
    return obj


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_reports(reports: list[Report], as_json: bool) -> int:
    ok = all(r.ok for r in reports)
    if as_json:
        _emit(io.dumps({"ok": ok, "reports": [r.to_dict() for r in reports]}))
    else:
        _emit("\n".join(r.to_text() for r in reports))
    return 0 if ok else 1


def _artifact(obj, reports: list[Report], args) -> int:
    """Print the artifact when every report passes, else the failing reports."""
    if all(r.ok for r in reports):
        _emit(io.serialize_structure(obj))
        if args.report:
            sys.stderr.write("\n".join(json.dumps(r.to_dict()) if args.json else r.to_text()
                                       for r in reports) + "\n")
        return 0
    return _emit_reports(reports, True)


# -- verbs ------------------------------------------------------------------

def cmd_check(args) -> int:
    obj = _load(args.file, args)
    if isinstance(obj, SpecStructure):
        reports = [check_axioms(obj)]
        if args.regular:
            reports.append(check_regular(obj))
    elif isinstance(obj, ClosureSemilattice):
        reports = [validate_closure_semilattice(obj)]
    elif isinstance(obj, ClosureSpace):
        report = validate_closure_space(obj)
        if obj.size <= 8:
            report.info["topological"] = topological_check(obj)
            gap = topo_gap_witness(obj)
            if gap is not None:
                report.info["topo_gap"] = {k: obj.names(m) for k, m in zip("abc", gap)}
        reports = [report]
    else:
        reports = [check_homomorphism(obj)]
    return _emit_reports(reports, args.json)


def cmd_saturate(args) -> int:
    M = _load(args.file, args, SpecStructure)
    return _artifact(M.with_relation(saturate(M.lattice, M.explicit(), _max_elements(args))), [], args)


def cmd_extend(args) -> int:
    M = _load(args.file, args, SpecStructure)
    E = build_free_extension(M, _max_elements(args, DEFAULT_MAX_PARENT))
    reports = [validate_closure_semilattice(E.closure_semilattice), check_axioms(E.structure),
               check_regular(E.structure), unit_embedding(E).report]
    return _artifact(io.extension_object(E), reports, args)


def cmd_embed(args) -> int:
    S = _load(args.file, args, ClosureSemilattice)
    emb = embed_closure_semilattice(S)
    return _artifact(io.embedding_object(emb), [emb.report], args)


def cmd_reduct(args) -> int:
    obj = _load(args.file, args, ClosureSemilattice, ClosureSpace)
    if isinstance(obj, ClosureSpace):
        return _artifact(reduct_of_closure_space(obj, _max_elements(args)), [], args)
    return _artifact(reduct_of_closure_semilattice(obj), [], args)


def cmd_represent(args) -> int:
    M = _load(args.file, args, SpecStructure)
    E = build_free_extension(M, _max_elements(args, DEFAULT_MAX_PARENT))
    emb = represent(M, E, args.max_ground)
    return _artifact(io.embedding_object(emb), [emb.report], args)


def cmd_lift(args) -> int:
    h = _load(args.file, args, Homomorphism)
    M, T = h.source, h.target
    cap = _max_elements(args, DEFAULT_MAX_PARENT)
    E = build_free_extension(M, cap)
    if args.between:
        EU = build_free_extension(T, cap)
        lifted = lift_between_extensions(M, T, h, E, EU, check_unique=not args.no_unique)
        target_name = EU.label
    else:
        lifted = lift_homomorphism(M, T, h, E, check_unique=not args.no_unique)
        target_name = T.lattice.name
    out = {"kind": "lift", "map": {E.label(c): target_name(lifted.hom(c)) for c in range(E.size)}}
    return _artifact(out, [lifted.report], args)


def cmd_search(args) -> int:
    if args.generate:
        cfg = GenConfig(args.size or 5, args.seed, args.density)
        obj = random_spec_structure(cfg) if args.generate == "mspec" else random_closure_semilattice(cfg)
        _emit(io.serialize_structure(obj))
        return 0
    if not args.property:
        raise UsageError("search needs --property or --generate")
    result = search_witness(args.property, args.size or (3 if args.property == "topo-gap" else 5))
    if result is None:
        _emit(io.dumps({"kind": "witness", "predicate": args.property, "structure": None}))
        return 1
    _emit(io.dumps({"kind": "witness", "predicate": result.predicate,
                    "structure": io.to_object(result.structure), "witness": result.witness}))
    return 0


def cmd_verify(args) -> int:
    suite = args.suite
    if args.files and suite in ("universal", "emb"):
        raise UsageError(f"suite {suite} does not take input files")
    if args.files:
        cases = []
        for f in args.files:
            obj = _load(f, args, SpecStructure, ClosureSemilattice, ClosureSpace)
            cases.append(suites.Case(Path(f).name, io.as_spec(obj, f)))
    elif suite == "corm":
        cases = ([c for c in suites.random_cases(args.count or 200, args.size or 5, args.seed)
                  if c.structure.n <= 3]
                 + list(suites.exhaustive_cases(3)) + suites.named_cases())
    else:
        cases = suites.default_cases(args.count or 200, args.size or 5, args.seed)
    if suite == "axioms":
        report = suites.suite_axioms(cases)
    elif suite == "derived":
        report = suites.suite_derived(cases)
    elif suite == "corre2":
        report = suites.suite_corre2(cases)
    elif suite == "corm":
        report = suites.suite_corm(cases)
    elif suite == "emb":
        report = suites.suite_emb(args.count or 100, args.size or 6, args.seed)
    else:
        if (args.size or 3) > 3:
            raise SizeCapError("universal suite is bounded by size 3")
        report = suites.suite_universal(args.size or 3)
    return _emit_reports([report], args.json)


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable reports")
    common.add_argument("--report", action="store_true", help="also print verification reports to stderr")
    common.add_argument("--max-elements", type=int, default=None,
                        help=f"carrier cap (default {DEFAULT_MAX_ELEMENTS}, {DEFAULT_MAX_PARENT} for "
                             f"extensions; env {ENV_MAX_ELEMENTS} / {ENV_MAX_EXTEND})")
    common.add_argument("--max-points", type=int, default=None,
                        help=f"closure space cap (default {DEFAULT_MAX_POINTS}; env {ENV_MAX_POINTS})")

    parser = argparse.ArgumentParser(prog="specsemi",
                                     description="Finite multi-argument specialization semilattices.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a structure file")
    p.add_argument("file")
    p.add_argument("--regular", action="store_true", help="also test regularity (mspec)")
    p.set_defaults(func=cmd_check)

    for verb, func, text in [("saturate", cmd_saturate, "least relation satisfying the axioms"),
                             ("extend", cmd_extend, "free principal extension"),
                             ("embed", cmd_embed, "embed a closure semilattice into a closure space"),
                             ("reduct", cmd_reduct, "relation induced by a closure"),
                             ("represent", cmd_represent, "realize a structure inside a closure space")]:
        p = sub.add_parser(verb, parents=[common], help=text)
        p.add_argument("file")
        if verb == "represent":
            p.add_argument("--max-ground", type=int, default=DEFAULT_MAX_GROUND)
        p.set_defaults(func=func)

    p = sub.add_parser("lift", parents=[common], help="lift a homomorphism to the extension")
    p.add_argument("file", help="hom file")
    p.add_argument("--between", action="store_true", help="lift into the extension of the target")
    p.add_argument("--no-unique", action="store_true", help="skip the uniqueness enumeration")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("search", parents=[common], help="witness search or random generation")
    p.add_argument("--property", choices=PREDICATES)
    p.add_argument("--generate", choices=("mspec", "csl"))
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=float, default=0.5)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=suites.SUITES)
    p.add_argument("files", nargs="*", help="structure files to use instead of the generated corpus")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        _emit_reports([exc.report], True)
        return 1
    except (StructureError, SizeCapError, LiftError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
