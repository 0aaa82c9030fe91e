"""Attribute-set bitmask helpers.

An attribute set is a plain Python int with bit i set for attribute index i.
Python ints keep the representation exact for any schema width; the compiled
kernels additionally require masks to fit in 64 bits.
"""

from __future__ import annotations

from typing import Iterator


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def from_bits(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def popcount(mask: int) -> int:
    return mask.bit_count()


def is_subset(a: int, b: int) -> bool:
    """True iff set ``a`` is contained in set ``b``."""
    return a & b == a


def full_mask(m: int) -> int:
    return (1 << m) - 1


def format_attrs(mask: int, names) -> str:
    """Render a mask as comma-joined attribute names, ``{}`` when empty."""
    if mask == 0:
        return "{}"
    return ",".join(names[i] for i in bits(mask))
