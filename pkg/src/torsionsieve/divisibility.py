"""Order-divisibility sieve over F_{l^d'} for d' <= d.

A candidate prime p survives (and needs further treatment downstream)
when either some elliptic-curve group order over F_{l^d'} is divisible
by p, or p divides l^d' +/- 1, for some d' <= d.  The union runs over
ALL d' <= d, not just divisors of d: degree-d' closed points need not
live in subfields of F_{l^d}.

Censuses come from `curves.trace_census`.  For l = 2 the family census
is complete; for l = 3 the short-form family misses ordinary curves, so
full-mode censuses are used there (hence d <= 3 for l = 3).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Literal, Mapping

from .curves import FULL_MODE_CAP, CensusError, trace_census
from .primes import is_prime, prime_factors


@dataclass(frozen=True)
class OrderWitness:
    """First (smallest d', then smallest |a|) curve-order witness for p."""

    d_prime: int
    trace: int
    order: int


@dataclass(frozen=True)
class PrimeStatus:
    """Outcome of the automatic check for one candidate prime."""

    kind: Literal["clear", "fails_curve_order", "fails_cyclotomic"]
    witness: OrderWitness | None = None
    cyclotomic: tuple[int, int] | None = None  # (d', sign) with p | l^d' + sign


@dataclass(frozen=True)
class CriterionBReport:
    l: int
    d: int
    per_prime: Mapping[int, PrimeStatus]

    def survivors(self) -> list[int]:
        return sorted(p for p, s in self.per_prime.items() if s.kind != "clear")


def _census_for(l: int, d_prime: int, cache_dir=None):
    if l == 2:
        return trace_census(l, d_prime, "family", cache_dir=cache_dir)
    if l == 3:
        if 3**d_prime > FULL_MODE_CAP:
            raise CensusError(
                "criterion checks for l = 3 need full-mode censuses (short-form "
                f"families are supersingular-only in char 3); 3^{d_prime} exceeds "
                f"the full-mode cap {FULL_MODE_CAP}"
            )
        return trace_census(l, d_prime, "full", cache_dir=cache_dir)
    return trace_census(l, d_prime, "family", cache_dir=cache_dir)


def primes_dividing_orders(
    l: int, d: int, cache_dir: str | os.PathLike | None = None
) -> list[int]:
    """Sorted primes dividing some realized group order over F_{l^d'}, d' <= d."""
    found: set[int] = set()
    for d_prime in range(1, d + 1):
        census = _census_for(l, d_prime, cache_dir)
        for n in census.realized_orders:
            if n > 1:
                found.update(prime_factors(n))
    return sorted(found)


def order_witnesses(
    l: int, d: int, cache_dir: str | os.PathLike | None = None
) -> dict[int, OrderWitness]:
    """First witness (smallest d', then smallest |a|, ties to negative a) per prime."""
    witnesses: dict[int, OrderWitness] = {}
    for d_prime in range(1, d + 1):
        census = _census_for(l, d_prime, cache_dir)
        q = census.field.q
        for a in sorted(census.realized_traces, key=lambda a: (abs(a), a)):
            n = q + 1 - a
            if n <= 1:
                continue
            for p in prime_factors(n):
                if p not in witnesses:
                    witnesses[p] = OrderWitness(d_prime, a, n)
    return witnesses


def cyclotomic_divisor(p: int, l: int, d: int) -> tuple[int, int] | None:
    """Least (d', sign), d' <= d, with p | l^d' + sign; None if no hit."""
    if p == l:
        raise ValueError("p must differ from l")
    for d_prime in range(1, d + 1):
        for sign in (-1, 1):
            if (l**d_prime + sign) % p == 0:
                return (d_prime, sign)
    return None


def evaluate_criterion_b(
    l: int,
    d: int,
    candidates: list[int] | set[int],
    cache_dir: str | os.PathLike | None = None,
) -> CriterionBReport:
    """Classify each candidate as clear / fails_curve_order / fails_cyclotomic.

    Every failure records an independently re-verifiable witness: a
    realized trace with p | q + 1 - a, or a cyclotomic pair.
    """
    cand = sorted(set(candidates))
    if l in cand:
        raise ValueError(f"candidate set must be disjoint from l = {l}")
    for p in cand:
        if not is_prime(p):
            raise ValueError(f"candidate {p} is not prime")
    witnesses = order_witnesses(l, d, cache_dir) if cand else {}
    per_prime: dict[int, PrimeStatus] = {}
    for p in cand:
        w = witnesses.get(p)
        if w is not None:
            q = l**w.d_prime
            if w.trace * w.trace > 4 * q or (q + 1 - w.trace) % p != 0:
                raise AssertionError(f"stored witness for {p} fails re-verification")
            per_prime[p] = PrimeStatus("fails_curve_order", witness=w)
            continue
        cyc = cyclotomic_divisor(p, l, d)
        if cyc is not None:
            d_prime, sign = cyc
            if (l**d_prime + sign) % p != 0:
                raise AssertionError(f"cyclotomic witness for {p} fails re-verification")
            per_prime[p] = PrimeStatus("fails_cyclotomic", cyclotomic=cyc)
            continue
        per_prime[p] = PrimeStatus("clear")
    return CriterionBReport(l, d, per_prime)


def criterion_b_survivors(
    l: int,
    d: int,
    candidates: list[int] | set[int],
    cache_dir: str | os.PathLike | None = None,
) -> list[int]:
    """Candidates that the automatic check cannot clear, sorted.

    These primes are routed to external evidence or to the index-growth
    gate downstream; the clear ones are eliminated on the spot.
    """
    return evaluate_criterion_b(l, d, candidates, cache_dir).survivors()


def cusp_closed_point_degree(p: int, l: int) -> int:
    """Multiplicative order of l in (Z/pZ)^x / {+-1}.

    The residue degree of the boundary points of level-p modular curves
    over F_l; a diagnostic companion to the cyclotomic condition.
    """
    if not is_prime(p) or p == 2:
        raise ValueError("p must be an odd prime")
    if p == l:
        raise ValueError("p must differ from l")
    x = l % p
    acc = x
    for m in range(1, p):
        if acc == 1 or acc == p - 1:
            return m
        acc = (acc * x) % p
    raise AssertionError("order computation failed; unreachable")
