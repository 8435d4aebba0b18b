"""Small-prime utilities: sieve, primality, ranges.

Everything here targets primes below ~10^7; no large-integer machinery.
"""

from __future__ import annotations

from functools import lru_cache


@lru_cache(maxsize=None)
def _sieve(limit: int) -> tuple[int, ...]:
    """Primes p <= limit via Eratosthenes."""
    if limit < 2:
        return ()
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    p = 2
    while p * p <= limit:
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
        p += 1
    return tuple(i for i, f in enumerate(flags) if f)


def primes_upto(limit: int) -> list[int]:
    return list(_sieve(limit))


def primes_in_range(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p < hi."""
    if hi <= 2:
        return []
    return [p for p in _sieve(hi - 1) if p >= lo]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Sorted distinct prime divisors of n >= 1."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out
