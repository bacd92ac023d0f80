"""Finite join-semilattices given by an explicit join table."""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property, reduce

from .bits import iter_bits
from .errors import StructureError, UnknownElementError
from .reports import Report


@dataclass(frozen=True)
class FiniteJoinSemilattice:
    """Carrier ``elements`` with ``join[i][j]`` the index of ``elements[i] v elements[j]``.

    Elements are addressed by index everywhere; names are only surface syntax.
    Construction checks the table shape, not the semilattice laws (see
    :func:`validate_join_table`).
    """

    elements: tuple[str, ...]
    join: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise StructureError("carrier must be nonempty", "$.elements")
        if len(set(self.elements)) != n:
            raise StructureError("duplicate element names", "$.elements")
        if len(self.join) != n:
            raise StructureError(f"join table has {len(self.join)} rows, expected {n}", "$.join")
        for i, row in enumerate(self.join):
            if len(row) != n:
                raise StructureError(f"row has {len(row)} entries, expected {n}", f"$.join[{i}]")
            for j, v in enumerate(row):
                if not isinstance(v, int) or not 0 <= v < n:
                    raise UnknownElementError(f"entry {v!r} is not an element index", f"$.join[{i}][{j}]")

    @classmethod
    def from_table(cls, elements: Sequence[str], join: Sequence[Sequence[int]]) -> FiniteJoinSemilattice:
        return cls(tuple(elements), tuple(tuple(row) for row in join))

    @classmethod
    def from_order(cls, elements: Sequence[str], above: dict[str, str]) -> FiniteJoinSemilattice:
        """Build from ``above[x]`` = names of all elements >= x (including x).

        Raises StructureError when some pair has no least upper bound.
        """
        names = list(elements)
        n = len(names)
        up = [{names.index(y) for y in above[x]} | {i} for i, x in enumerate(names)]
        table = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                common = up[i] & up[j]
                least = [z for z in common if common <= up[z]]
                if len(least) != 1:
                    raise StructureError(f"{names[i]} and {names[j]} have no join")
                table[i][j] = least[0]
        return cls.from_table(names, table)

    @classmethod
    def chain(cls, n: int, names: Sequence[str] | None = None) -> FiniteJoinSemilattice:
        names = list(names) if names is not None else [str(i) for i in range(n)]
        return cls.from_table(names, [[max(i, j) for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, name: str | int) -> int:
        if isinstance(name, int) and not isinstance(name, bool):
            if 0 <= name < self.n:
                return name
            raise UnknownElementError(f"index {name} out of range")
        try:
            return self._index[name]
        except KeyError:
            raise UnknownElementError(f"unknown element {name!r}") from None

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.elements)}

    def name(self, i: int) -> str:
        return self.elements[i]

    def names(self, mask: int) -> list[str]:
        return [self.elements[i] for i in iter_bits(mask)]

    def j(self, a: int, b: int) -> int:
        return self.join[a][b]

    def leq(self, a: int, b: int) -> bool:
        return self.join[a][b] == b

    def join_set(self, items: Iterable[int]) -> int:
        items = list(items)
        if not items:
            raise ValueError("join of the empty set is undefined")
        return reduce(self.j, items)

    def join_mask(self, mask: int) -> int:
        if not mask:
            raise ValueError("join of the empty set is undefined")
        return reduce(self.j, iter_bits(mask))

    @cached_property
    def down(self) -> tuple[int, ...]:
        """``down[b]`` is the bitmask of all a <= b."""
        n = self.n
        return tuple(sum(1 << a for a in range(n) if self.join[a][b] == b) for b in range(n))

    @cached_property
    def up(self) -> tuple[int, ...]:
        n = self.n
        return tuple(sum(1 << b for b in range(n) if self.join[a][b] == b) for a in range(n))

    @cached_property
    def top(self) -> int:
        return self.join_mask((1 << self.n) - 1)


def validate_join_table(lattice: FiniteJoinSemilattice) -> Report:
    """Check idempotence, commutativity, associativity; first violated law gets a witness."""
    n, J, names = lattice.n, lattice.join, lattice.elements
    report = Report("join-semilattice")
    report.add("idempotent", next(({"a": names[a]} for a in range(n) if J[a][a] != a), None))
    report.add("commutative", next(({"a": names[a], "b": names[b]}
                                    for a in range(n) for b in range(n) if J[a][b] != J[b][a]), None))
    report.add("associative", next(({"a": names[a], "b": names[b], "c": names[c]}
                                    for a in range(n) for b in range(n) for c in range(n)
                                    if J[J[a][b]][c] != J[a][J[b][c]]), None))
    return report


def leq(lattice: FiniteJoinSemilattice, a: int, b: int) -> bool:
    return lattice.leq(a, b)


def join_set(lattice: FiniteJoinSemilattice, items: Iterable[int]) -> int:
    return lattice.join_set(items)
