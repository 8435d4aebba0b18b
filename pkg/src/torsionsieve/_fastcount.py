"""Vectorized point counting for censuses (internal).

The mathematics is the same exhaustive x-sweep as the pure path: in
characteristic 2 the Artin-Schreier trace condition decides the
quadratic in y, in odd characteristic the quadratic character of the
completed square does.  numpy tables (built from the exact field core)
let whole coefficient families be counted at once.  Every public census
entry point cross-checks a sample against the pure path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import FiniteField
from .primes import prime_factors

_TABLES: dict = {}


@dataclass(frozen=True)
class _Tables:
    q: int
    mul: np.ndarray  # (q, q) codes
    inv: np.ndarray  # (q,), inv[0] = 0 placeholder
    tr: np.ndarray | None  # char 2 absolute trace bits
    chi: np.ndarray | None  # odd char quadratic character in {-1, 0, 1}


def _encode(field: FiniteField, coeffs: tuple[int, ...]) -> int:
    n = 0
    for c in reversed(coeffs):
        n = n * field.l + c
    return n


def tables(field: FiniteField) -> _Tables:
    key = (field.l, field.k, field.modulus)
    if key in _TABLES:
        return _TABLES[key]
    q = field.q
    one = field._one_coeffs()
    if q == 2:
        g = one
    else:
        for gcode in range(2, q):
            g = field.element(gcode).coeffs
            if all(
                field._pow(g, (q - 1) // r) != one for r in prime_factors(q - 1)
            ):
                break
        else:
            raise AssertionError("no multiplicative generator found")
    exp = np.zeros(q - 1, dtype=np.int64)
    cur = one
    for i in range(q - 1):
        exp[i] = _encode(field, cur)
        cur = field._mul(cur, g)
    log = np.zeros(q, dtype=np.int64)
    log[exp] = np.arange(q - 1)
    mul = np.zeros((q, q), dtype=np.int64)
    nz = np.arange(1, q)
    mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
    inv = np.zeros(q, dtype=np.int64)
    inv[nz] = exp[(q - 1 - log[nz]) % (q - 1)]
    tr = chi = None
    if field.l == 2:
        tr = np.array(
            [field.trace_bit(field.element(c).coeffs) for c in range(q)],
            dtype=np.uint8,
        )
    else:
        chi = np.zeros(q, dtype=np.int64)
        chi[exp] = np.where(np.arange(q - 1) % 2 == 0, 1, -1)
    t = _Tables(q, mul, inv, tr, chi)
    _TABLES[key] = t
    return t


def _add_codes(field: FiniteField, a, b):
    """Field addition on integer codes, broadcasting over numpy arrays."""
    if field.l == 2:
        return np.bitwise_xor(a, b)
    l = field.l
    a = np.asarray(a)
    b = np.asarray(b)
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    powl = 1
    for _ in range(field.k):
        out += (((a // powl) + (b // powl)) % l) * powl
        powl *= l
    return out


def family_counts_char2(field: FiniteField) -> set[int]:
    """Realized point counts of the two char-2 families over F_q."""
    t = tables(field)
    q = field.q
    counts: set[int] = set()

    # ordinary family y^2 + xy = x^3 + a2 x^2 + a6, a6 != 0:
    # per x != 0, two y iff Tr(x) + Tr(a2) + Tr(a6 x^-2) = 0
    xs = np.arange(1, q)
    x2inv = t.mul[t.inv[xs], t.inv[xs]]
    txs = t.tr[xs]
    bits6 = t.tr[t.mul[np.arange(1, q)[:, None], x2inv[None, :]]]  # (a6, x)
    z0 = np.count_nonzero((txs[None, :] ^ bits6) == 0, axis=1)
    for z in np.unique(z0):  # Tr(a2) takes both values as a2 ranges over F_q
        counts.add(2 + 2 * int(z))
        counts.add(2 + 2 * (q - 1 - int(z)))

    # supersingular family y^2 + a3 y = x^3 + a4 x + a6, a3 != 0:
    # per x, two y iff Tr((x^3 + a4 x + a6) / a3^2) = 0
    xall = np.arange(q)
    x3 = t.mul[xall, t.mul[xall, xall]]
    a4s = np.arange(q)
    for a3 in range(1, q):
        w = t.inv[t.mul[a3, a3]]
        u = t.tr[t.mul[x3, w]]
        wx = t.mul[xall, w]
        bits4 = t.tr[t.mul[a4s[:, None], wx[None, :]]]  # (a4, x)
        z = np.count_nonzero((u[None, :] ^ bits4) == 0, axis=1)
        for zz in np.unique(z):  # Tr(a6 w) takes both values over a6
            counts.add(1 + 2 * int(zz))
            counts.add(1 + 2 * (q - int(zz)))
    return counts


def family_counts_odd(field: FiniteField) -> set[int]:
    """Realized counts of y^2 = x^3 + a x + b over F_q, odd characteristic."""
    t = tables(field)
    q = field.q
    xs = np.arange(q)
    x3 = t.mul[xs, t.mul[xs, xs]]
    c4 = 4 % field.l
    c27 = 27 % field.l
    bs = np.arange(q)
    counts: set[int] = set()
    for a in range(q):
        base = _add_codes(field, x3, t.mul[a, xs])  # (x,)
        f = _add_codes(field, base[None, :], bs[:, None])  # (b, x)
        sums = t.chi[f].sum(axis=1)
        disc = _add_codes(
            field, t.mul[c4, t.mul[a, t.mul[a, a]]], t.mul[c27, t.mul[bs, bs]]
        )
        ns = q + 1 + sums
        counts.update(int(n) for n, d in zip(ns, disc) if d != 0)
    return counts


def full_counts_char2(field: FiniteField) -> set[int]:
    """Realized counts over all smooth long Weierstrass models, q <= 2^5."""
    t = tables(field)
    q = field.q
    xs = np.arange(q)
    x2 = t.mul[xs, xs]
    x3 = t.mul[xs, x2]
    rng = np.arange(q)
    counts: set[int] = set()
    for a1 in range(q):
        for a3 in range(q):
            h = t.mul[a1, xs] ^ a3
            n_h0 = int(np.count_nonzero(h == 0))
            sel = h != 0
            xs1 = xs[sel]
            w = t.inv[t.mul[h[sel], h[sel]]]
            t0 = t.tr[t.mul[x3[sel], w]]  # (x,)
            p2 = t.tr[t.mul[rng[None, :], t.mul[x2[sel], w][:, None]]]  # (x, a2)
            p4 = t.tr[t.mul[rng[None, :], t.mul[xs1, w][:, None]]]  # (x, a4)
            p6 = t.tr[t.mul[rng[None, :], w[:, None]]]  # (x, a6)
            bits = (
                (t0[:, None] ^ p2)[:, :, None, None]
                ^ p4[:, None, :, None]
                ^ p6[:, None, None, :]
            )
            s = bits.sum(axis=0, dtype=np.int64)  # (a2, a4, a6)
            n = 1 + n_h0 + 2 * (len(xs1) - s)
            # discriminant in char 2: a1^4 b8 + a3^4 + a1^3 a3^3,
            # b8 = a1^2 a6 + a1 a3 a4 + a2 a3^2 + a4^2
            a1_2 = t.mul[a1, a1]
            a1_3 = t.mul[a1, a1_2]
            a3_2 = t.mul[a3, a3]
            b8 = (
                t.mul[a1_2, rng][None, None, :]
                ^ t.mul[t.mul[a1, a3], rng][None, :, None]
                ^ t.mul[a3_2, rng][:, None, None]
                ^ t.mul[rng, rng][None, :, None]
            )
            delta = t.mul[t.mul[a1_2, a1_2], b8] ^ t.mul[a3_2, a3_2] ^ t.mul[a1_3, t.mul[a3, a3_2]]
            counts.update(int(v) for v in np.unique(n[delta != 0]))
    return counts


def full_counts_odd(field: FiniteField) -> set[int]:
    """Realized counts over all smooth models, odd char, q <= 2^5.

    Completing the square reduces every long model to y^2 = cubic with
    the same per-x solution count, and every y^2 = x^3 + c2 x^2 + c4 x + c6
    arises that way, so sweeping the three-coefficient family realizes
    the identical count set.
    """
    t = tables(field)
    q = field.q
    xs = np.arange(q)
    x2 = t.mul[xs, xs]
    x3 = t.mul[xs, x2]
    rng = np.arange(q)
    counts: set[int] = set()
    c4m = 4 % field.l
    c18 = 18 % field.l
    c27 = 27 % field.l
    for c2 in range(q):
        base = _add_codes(field, x3, t.mul[c2, x2])  # (x,)
        for cc4 in range(q):
            f = _add_codes(field, base, t.mul[cc4, xs])  # (x,)
            g = _add_codes(field, f[None, :], rng[:, None])  # (c6, x)
            ns = q + 1 + t.chi[g].sum(axis=1)
            # disc(x^3 + b x^2 + c x + d) = 18bcd - 4b^3 d + b^2 c^2 - 4c^3 - 27d^2
            b, c, d = c2, cc4, rng
            term = _add_codes(field, t.mul[t.mul[c18, t.mul[b, c]], d],
                              t.mul[(field.l - c4m) % field.l, t.mul[t.mul[b, t.mul[b, b]], d]])
            term = _add_codes(field, term, t.mul[t.mul[b, b], t.mul[c, c]])
            term = _add_codes(field, term, t.mul[(field.l - c4m) % field.l, t.mul[c, t.mul[c, c]]])
            term = _add_codes(field, term, t.mul[(field.l - c27) % field.l, t.mul[d, d]])
            counts.update(int(n) for n, dd in zip(ns, term) if dd != 0)
    return counts


def single_count(model) -> int:
    """Table-driven count of one model; cross-check partner of point_count."""
    field: FiniteField = model.field
    t = tables(field)
    q = field.q
    xs = np.arange(q)
    a1, a2, a3, a4, a6 = (
        model.a1.code, model.a2.code, model.a3.code, model.a4.code, model.a6.code,
    )
    x2 = t.mul[xs, xs]
    x3 = t.mul[xs, x2]
    if field.l == 2:
        h = t.mul[a1, xs] ^ a3
        f = x3 ^ t.mul[a2, x2] ^ t.mul[a4, xs] ^ a6
        sel = h != 0
        w = t.inv[t.mul[h[sel], h[sel]]]
        bits = t.tr[t.mul[f[sel], w]]
        return 1 + int(np.count_nonzero(~sel)) + 2 * int(np.count_nonzero(bits == 0))
    h = _add_codes(field, t.mul[a1, xs], a3)
    f = _add_codes(field, _add_codes(field, x3, t.mul[a2, x2]),
                   _add_codes(field, t.mul[a4, xs], a6))
    arg = _add_codes(field, t.mul[h, h], t.mul[4 % field.l, f])
    return 1 + q + int(t.chi[arg].sum())
