"""JSON structure files.

Four kinds are read and written:

``mspec``  ``{"kind", "elements", "join", "spec"}`` with ``join`` row-major by
           name and ``spec`` a list of ``[lhs, [rhs, ...]]``;
``csl``    ``{"kind", "elements", "join", "K"}`` with ``K`` a name-to-name map;
``cspace`` ``{"kind", "points", "closed"}``;
``hom``    ``{"kind", "from", "to", "map"}`` where ``from``/``to`` are inline
           objects or paths relative to the hom file.

Output is canonical: fixed key order, elements in declared order, sets sorted
by declared index, one list item per line for lists of lists, LF line ends.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .errors import StructureError, UnknownElementError, ValidationError
from .extension import FreeExtension
from .lattice import FiniteJoinSemilattice, validate_join_table
from .reports import Report
from .structures import (
    ClosureSemilattice,
    ClosureSpace,
    Homomorphism,
    SpecStructure,
    normalize_spec_relation,
    validate_closure_semilattice,
    validate_closure_space,
)

KINDS = ("mspec", "csl", "cspace", "hom")
KEYS = {
    "mspec": ("kind", "elements", "join", "spec"),
    "csl": ("kind", "elements", "join", "K"),
    "cspace": ("kind", "points", "closed"),
    "hom": ("kind", "from", "to", "map"),
}
# an extension file is a csl with two extra sections
EXTENSION_KEYS = ("classes", "unit")

Structure = Union[SpecStructure, ClosureSemilattice, ClosureSpace, Homomorphism]


# -- parsing ---------------------------------------------------------------

def _expect(cond: bool, reason: str, path: str) -> None:
    if not cond:
        raise StructureError(reason, path)


def _names(value: Any, path: str) -> list[str]:
    _expect(isinstance(value, list), "expected a list of names", path)
    for i, v in enumerate(value):
        _expect(isinstance(v, str), "names must be strings", f"{path}[{i}]")
    return value


def _lookup(index: dict[str, int], name: Any, path: str, what: str = "element") -> int:
    _expect(isinstance(name, str), "names must be strings", path)
    if name not in index:
        raise UnknownElementError(f"unknown {what} {name!r}", path)
    return index[name]


def _lattice(obj: dict) -> FiniteJoinSemilattice:
    elements = _names(obj["elements"], "$.elements")
    _expect(len(elements) > 0, "carrier must be nonempty", "$.elements")
    _expect(len(set(elements)) == len(elements), "duplicate element names", "$.elements")
    index = {e: i for i, e in enumerate(elements)}
    join = obj["join"]
    n = len(elements)
    _expect(isinstance(join, list) and len(join) == n, f"join must have {n} rows", "$.join")
    table = []
    for i, row in enumerate(join):
        _expect(isinstance(row, list) and len(row) == n, f"row must have {n} entries", f"$.join[{i}]")
        table.append([_lookup(index, v, f"$.join[{i}][{j}]") for j, v in enumerate(row)])
    lattice = FiniteJoinSemilattice.from_table(elements, table)
    report = validate_join_table(lattice)
    if not report.ok:
        raise ValidationError(report)
    return lattice


def _check_keys(obj: dict, kind: str) -> None:
    allowed = set(KEYS[kind]) | (set(EXTENSION_KEYS) if kind == "csl" else set())
    for key in KEYS[kind]:
        _expect(key in obj, f"missing key {key!r}", "$")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise StructureError(f"unexpected key {extra[0]!r}", "$")


def from_object(obj: Any, base_dir: Path | None = None) -> Structure:
    _expect(isinstance(obj, dict), "expected a JSON object", "$")
    kind = obj.get("kind")
    _expect(kind in KINDS, f"kind must be one of {', '.join(KINDS)}", "$.kind")
    _check_keys(obj, kind)
    if kind == "mspec":
        lattice = _lattice(obj)
        spec = obj["spec"]
        _expect(isinstance(spec, list), "spec must be a list", "$.spec")
        for k, item in enumerate(spec):
            _expect(isinstance(item, list) and len(item) == 2, "spec items are [lhs, [rhs...]]", f"$.spec[{k}]")
            _expect(isinstance(item[0], str), "names must be strings", f"$.spec[{k}][0]")
            _expect(isinstance(item[1], list), "right-hand side must be a list", f"$.spec[{k}][1]")
            for i, b in enumerate(item[1]):
                _expect(isinstance(b, str), "names must be strings", f"$.spec[{k}][1][{i}]")
        return SpecStructure(lattice, normalize_spec_relation(lattice, spec))
    if kind == "csl":
        lattice = _lattice(obj)
        K = obj["K"]
        _expect(isinstance(K, dict), "K must be an object", "$.K")
        index = {e: i for i, e in enumerate(lattice.elements)}
        for key in K:
            _lookup(index, key, f"$.K[{key!r}]")
        missing = [e for e in lattice.elements if e not in K]
        if missing:
            raise StructureError(f"K is not total: missing {missing[0]!r}", "$.K")
        csl = ClosureSemilattice(lattice, tuple(_lookup(index, K[e], f"$.K[{e!r}]") for e in lattice.elements))
        report = validate_closure_semilattice(csl)
        if not report.ok:
            raise ValidationError(report)
        return csl
    if kind == "cspace":
        points = _names(obj["points"], "$.points")
        _expect(len(set(points)) == len(points), "duplicate point names", "$.points")
        closed = obj["closed"]
        _expect(isinstance(closed, list), "closed must be a list", "$.closed")
        index = {p: i for i, p in enumerate(points)}
        masks = []
        for k, c in enumerate(closed):
            _names(c, f"$.closed[{k}]")
            mask = 0
            for i, p in enumerate(c):
                mask |= 1 << _lookup(index, p, f"$.closed[{k}][{i}]", "point")
            masks.append(mask)
        full = (1 << len(points)) - 1
        _expect(full in masks, "closed family must contain the ground set", "$.closed")
        space = ClosureSpace(tuple(points), tuple(masks))
        report = validate_closure_space(space)
        if not report.ok:
            raise ValidationError(report)
        return space
    # hom
    source = as_spec(_resolve(obj["from"], base_dir, "$.from"), "$.from")
    target = as_spec(_resolve(obj["to"], base_dir, "$.to"), "$.to")
    mapping = obj["map"]
    _expect(isinstance(mapping, dict), "map must be an object", "$.map")
    s_index = {e: i for i, e in enumerate(source.elements)}
    t_index = {e: i for i, e in enumerate(target.elements)}
    for key in mapping:
        _lookup(s_index, key, f"$.map[{key!r}]")
    missing = [e for e in source.elements if e not in mapping]
    if missing:
        raise StructureError(f"map is not total: missing {missing[0]!r}", "$.map")
    return Homomorphism(source, target,
                        tuple(_lookup(t_index, mapping[e], f"$.map[{e!r}]") for e in source.elements))


def _resolve(ref: Any, base_dir: Path | None, path: str) -> Structure:
    if isinstance(ref, str):
        file = Path(ref)
        if not file.is_absolute() and base_dir is not None:
            file = base_dir / file
        try:
            return load_structure(file)
        except OSError as exc:
            raise StructureError(f"cannot read {ref!r}: {exc.strerror}", path) from None
        except StructureError as exc:
            raise StructureError(f"in {ref!r}: {exc}", path) from None
    try:
        return from_object(ref, base_dir)
    except StructureError as exc:
        raise StructureError(exc.reason, path + exc.path[1:]) from None


def as_spec(obj: Structure, path: str) -> SpecStructure:
    # closure semilattices and closure spaces stand in through their reducts
    from .representation import reduct_of_closure_semilattice, reduct_of_closure_space

    if isinstance(obj, SpecStructure):
        return obj
    if isinstance(obj, ClosureSemilattice):
        return reduct_of_closure_semilattice(obj)
    if isinstance(obj, ClosureSpace):
        return reduct_of_closure_space(obj)
    raise StructureError("expected a structure, not a map", path)


def parse_structure(text: str, base_dir: Path | None = None) -> Structure:
    """Parse and validate one structure file.

    Raises StructureError for malformed input and ValidationError when the
    carrier laws (join table, closure laws, closure system) fail.  Axioms of
    ``mspec`` relations and preservation by ``hom`` maps are left to the
    checkers, since seeds and candidate maps are legitimate inputs.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    return from_object(obj, base_dir)


def load_structure(path: str | Path) -> Structure:
    path = Path(path)
    return parse_structure(path.read_text(encoding="utf-8"), path.parent)


# -- serialization ---------------------------------------------------------

def _join_names(L: FiniteJoinSemilattice) -> list[list[str]]:
    return [[L.name(v) for v in row] for row in L.join]


def to_object(obj: Any) -> dict:
    if isinstance(obj, FreeExtension):
        return extension_object(obj)
    if isinstance(obj, SpecStructure):
        L = obj.lattice
        return {"kind": "mspec", "elements": list(L.elements), "join": _join_names(L),
                "spec": [[L.name(a), L.names(B)] for a, B in obj.explicit().pairs()]}
    if isinstance(obj, ClosureSemilattice):
        L = obj.lattice
        return {"kind": "csl", "elements": list(L.elements), "join": _join_names(L),
                "K": {L.name(a): L.name(obj.k[a]) for a in range(L.n)}}
    if isinstance(obj, ClosureSpace):
        return {"kind": "cspace", "points": list(obj.points),
                "closed": [obj.names(c) for c in obj.closed]}
    if isinstance(obj, Homomorphism):
        return {"kind": "hom", "from": to_object(obj.source), "to": to_object(obj.target),
                "map": obj.named()}
    if isinstance(obj, Report):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def extension_object(E: FreeExtension) -> dict:
    out = to_object(E.closure_semilattice)
    out["classes"] = {E.label(c): [E.pair_name(p) for p in E.members[c]] for c in range(E.size)}
    out["unit"] = {E.parent.lattice.name(a): E.label(E.unit_map[a]) for a in range(E.parent.n)}
    return out


def embedding_object(emb) -> dict:
    return {"kind": "embedding", "space": to_object(emb.space), "map": emb.named()}


def _has_containers(value: list) -> bool:
    return any(isinstance(v, (list, dict)) for v in value)


def _compact(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False, separators=(", ", ": "))


def dumps(value: Any, indent: int = 0) -> str:
    """Deterministic layout: objects one key per line, nested lists one item per line."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{_compact(str(k))}: {dumps(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list) and value and _has_containers(value):
        items = [inner + (dumps(v, indent + 1) if isinstance(v, dict) else _compact(v)) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _compact(value)


def serialize_structure(obj: Any) -> str:
    return dumps(obj if isinstance(obj, dict) else to_object(obj)) + "\n"


def canonicalize(text: str, base_dir: Path | None = None) -> str:
    return serialize_structure(parse_structure(text, base_dir))
