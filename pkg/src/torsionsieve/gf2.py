"""GF(2) linear algebra on int bitsets, plus the mod-2 reduction of rational matrices."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def rank_gf2(rows: list[int]) -> int:
    """Rank over GF(2) via bit-packed Gaussian elimination."""
    pivots: list[int] = []
    rank = 0
    for row in rows:
        for p in pivots:
            low = p & -p
            if row & low:
                row ^= p
        if row:
            pivots.append(row)
            rank += 1
    return rank


def rank_gf2_naive(rows: Sequence[Sequence[int]]) -> int:
    """List-of-lists elimination; independent oracle for rank_gf2."""
    work = [[int(v) & 1 for v in r] for r in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    row_idx = 0
    for col in range(ncols):
        pivot = None
        for r in range(row_idx, len(work)):
            if work[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        for r in range(len(work)):
            if r != row_idx and work[r][col]:
                work[r] = [a ^ b for a, b in zip(work[r], work[row_idx])]
        rank += 1
        row_idx += 1
        if row_idx == len(work):
            break
    return rank


def pack_row(bits: Sequence[int]) -> int:
    n = 0
    for i, b in enumerate(bits):
        if int(b) & 1:
            n |= 1 << i
    return n


class NormalizationError(ValueError):
    """A row cannot be scaled to an integer vector with odd content removed."""


def normalize_row_mod2(row: Sequence[Fraction | int]) -> list[int]:
    """Scale a rational row to integers, removing only the odd part of the content.

    Multiply by the least common denominator, then divide by the largest
    ODD divisor of the gcd of the entries.  Powers of 2 in the content
    are kept: dividing them out would change mod-2 ranks.
    """
    fracs = []
    for v in row:
        if isinstance(v, Fraction):
            fracs.append(v)
        elif isinstance(v, int):
            fracs.append(Fraction(v))
        else:
            raise NormalizationError(f"entry {v!r} is not an exact rational")
    denom = lcm(*(f.denominator for f in fracs)) if fracs else 1
    ints = [int(f * denom) for f in fracs]
    content = 0
    for v in ints:
        content = gcd(content, v)
    if content:
        odd = content
        while odd % 2 == 0:
            odd //= 2
        ints = [v // odd for v in ints]
    return ints


def reduce_rank_gf2(matrix: Sequence[Sequence[Fraction | int]]) -> int:
    """Rank over GF(2) of a rational matrix after per-row normalization."""
    packed = [pack_row([v & 1 for v in normalize_row_mod2(row)]) for row in matrix]
    return rank_gf2(packed)


__all__ = [
    "rank_gf2",
    "rank_gf2_naive",
    "pack_row",
    "normalize_row_mod2",
    "reduce_rank_gf2",
    "NormalizationError",
]
