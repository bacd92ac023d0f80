"""Integer bitmask helpers for finite subsets of ``range(n)``."""
from __future__ import annotations

from collections.abc import Iterable, Iterator


def mask_of(indices: Iterable[int]) -> int:
    value = 0
    for i in indices:
        value |= 1 << i
    return value


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> list[int]:
    return list(iter_bits(mask))


def popcount(mask: int) -> int:
    return mask.bit_count()


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def subsets_of(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` (including 0 and ``mask``) in increasing order."""
    members = bits(mask)
    for code in range(1 << len(members)):
        yield mask_of(members[i] for i in iter_bits(code))


def nonempty_masks(n: int) -> range:
    return range(1, 1 << n)
