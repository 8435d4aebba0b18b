"""Exact arithmetic in small finite fields F_{l^k}.

Elements are represented in the polynomial basis: a length-k tuple
(c_0, ..., c_{k-1}) of residues mod l encodes c_0 + c_1*x + ... modulo a
fixed monic irreducible polynomial of degree k.  The modulus is chosen
deterministically (lexicographically least monic irreducible, scanning
low-degree coefficients first), so two constructions of the same field
agree element-for-element.

Every element also has an integer code sum(c_i * l^i), used for dense
table indexing; code order is the enumeration order (0 first, 1 second).

The supported size range is l^k <= 2^16.  Everything is exhaustive and
exact; there are no probabilistic shortcuts.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .primes import is_prime

MAX_CARDINALITY = 2**16


class FieldError(ValueError):
    """Invalid field parameters or mixed-field arithmetic."""


def _poly_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(num: list[int], den: list[int], l: int) -> tuple[list[int], list[int]]:
    """Division with remainder for coefficient lists over F_l; den monic-led."""
    num = list(num)
    dlead = den[-1]
    dinv = pow(dlead, l - 2, l) if dlead != 1 else 1
    deg_d = len(den) - 1
    quot = [0] * max(0, len(num) - deg_d)
    while len(num) - 1 >= deg_d and _poly_trim(num):
        shift = len(num) - 1 - deg_d
        factor = (num[-1] * dinv) % l
        if factor == 0:
            num.pop()
            continue
        quot[shift] = factor
        for i, dc in enumerate(den):
            num[shift + i] = (num[shift + i] - factor * dc) % l
        _poly_trim(num)
    return quot, num


def _is_irreducible(coeffs: tuple[int, ...], l: int) -> bool:
    """Exhaustive check: no monic factor of degree 1..k//2 divides coeffs."""
    k = len(coeffs) - 1
    if k == 1:
        return True
    for m in range(1, k // 2 + 1):
        for code in range(l**m):
            g = _digits(code, l, m) + [1]
            _, rem = _poly_divmod(list(coeffs), g, l)
            if not rem:
                return False
    return True


def _digits(n: int, l: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(n % l)
        n //= l
    return out


class FiniteField:
    """Descriptor for F_{l^k}: characteristic, degree, and modulus.

    Immutable; all arithmetic methods are pure functions on coefficient
    tuples.  Use :func:`make_field` for the canonical modulus choice.
    """

    __slots__ = ("l", "k", "q", "modulus")

    def __init__(self, l: int, k: int, modulus: Iterable[int]):
        if not is_prime(l):
            raise FieldError(f"characteristic {l} is not prime")
        if k < 1:
            raise FieldError(f"extension degree {k} must be positive")
        if l**k > MAX_CARDINALITY:
            raise FieldError(f"cardinality {l}^{k} exceeds the supported cap 2^16")
        mod = tuple(c % l for c in modulus)
        if len(mod) != k + 1 or mod[-1] != 1:
            raise FieldError("modulus must be monic of degree k")
        if not _is_irreducible(mod, l):
            raise FieldError(f"modulus {mod} is reducible over F_{l}")
        object.__setattr__  # noqa: B018  (slots; plain assignment below)
        self.l = l
        self.k = k
        self.q = l**k
        self.modulus = mod

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FiniteField)
            and (self.l, self.k, self.modulus) == (other.l, other.k, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.l, self.k, self.modulus))

    def __repr__(self) -> str:
        return f"FiniteField(l={self.l}, k={self.k}, q={self.q})"

    # -- raw coefficient arithmetic ---------------------------------------

    def _add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        l = self.l
        return tuple((x + y) % l for x, y in zip(a, b))

    def _sub(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        l = self.l
        return tuple((x - y) % l for x, y in zip(a, b))

    def _neg(self, a: tuple[int, ...]) -> tuple[int, ...]:
        l = self.l
        return tuple((-x) % l for x in a)

    def _mul(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        l, k, mod = self.l, self.k, self.modulus
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % l
        # reduce modulo the monic modulus, highest degree first
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg]
            if c:
                prod[deg] = 0
                shift = deg - k
                for i in range(k):
                    prod[shift + i] = (prod[shift + i] - c * mod[i]) % l
        return tuple(prod[:k])

    def _pow(self, a: tuple[int, ...], e: int) -> tuple[int, ...]:
        if e < 0:
            return self._pow(self._inv(a), -e)
        result = self._one_coeffs()
        base = a
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    def _inv(self, a: tuple[int, ...]) -> tuple[int, ...]:
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        return self._pow(a, self.q - 2)

    def _frobenius(self, a: tuple[int, ...]) -> tuple[int, ...]:
        return self._pow(a, self.l)

    def _zero_coeffs(self) -> tuple[int, ...]:
        return (0,) * self.k

    def _one_coeffs(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.k - 1)

    # -- element interface --------------------------------------------------

    def element(self, value: int | Iterable[int]) -> "FieldElement":
        """Element from an integer code or a coefficient iterable."""
        if isinstance(value, int):
            if not 0 <= value < self.q:
                value %= self.l  # small-integer convenience: embed the prime field
                return FieldElement(self, (value,) + (0,) * (self.k - 1))
            return FieldElement(self, tuple(_digits(value, self.l, self.k)))
        coeffs = tuple(c % self.l for c in value)
        if len(coeffs) != self.k:
            raise FieldError(f"expected {self.k} coefficients, got {len(coeffs)}")
        return FieldElement(self, coeffs)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, self._zero_coeffs())

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, self._one_coeffs())

    def __iter__(self) -> Iterator["FieldElement"]:
        for code in range(self.q):
            yield self.element(code)

    def trace_bit(self, a: tuple[int, ...]) -> int:
        """Absolute trace to the prime field, as an integer in [0, l)."""
        acc = a
        total = a
        for _ in range(self.k - 1):
            acc = self._frobenius(acc)
            total = self._add(total, acc)
        if any(total[1:]):
            raise AssertionError("trace left the prime field")
        return total[0]

    def quadratic_character(self, a: tuple[int, ...]) -> int:
        """chi(a) in {-1, 0, 1} for odd characteristic."""
        if self.l == 2:
            raise FieldError("quadratic character undefined in characteristic 2")
        if not any(a):
            return 0
        v = self._pow(a, (self.q - 1) // 2)
        if v == self._one_coeffs():
            return 1
        return -1


class FieldElement:
    """A field element: owning descriptor plus canonical coefficient tuple."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FiniteField, coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    @property
    def code(self) -> int:
        """Integer encoding sum(c_i * l^i); the enumeration index."""
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.l + c
        return n

    def _need_same_field(self, other: "FieldElement") -> None:
        if self.field != other.field:
            raise FieldError("elements belong to different fields")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            self._need_same_field(other)
            return other
        if isinstance(other, int):
            return self.field.element(other % self.field.l)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._add(self.coeffs, o.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._sub(self.coeffs, o.coeffs))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._sub(o.coeffs, self.coeffs))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._mul(self.coeffs, self.field._inv(o.coeffs)))

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.coeffs))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field._pow(self.coeffs, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field._inv(self.coeffs))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self == self.field.element(other % self.field.l)
        return (
            isinstance(other, FieldElement)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __repr__(self) -> str:
        return f"FieldElement({list(self.coeffs)} over q={self.field.q})"


def make_field(l: int, k: int) -> FiniteField:
    """Field descriptor with the canonical (lex-least monic irreducible) modulus.

    Deterministic: identical (l, k) always produce an identical modulus,
    scanning candidate constant-through-degree-(k-1) coefficient vectors
    in increasing integer-code order.
    """
    if not is_prime(l):
        raise FieldError(f"characteristic {l} is not prime")
    if k < 1:
        raise FieldError(f"extension degree {k} must be positive")
    if l**k > MAX_CARDINALITY:
        raise FieldError(f"cardinality {l}^{k} exceeds the supported cap 2^16")
    for code in range(l**k):
        coeffs = tuple(_digits(code, l, k)) + (1,)
        if _is_irreducible(coeffs, l):
            return FiniteField(l, k, coeffs)
    raise AssertionError("no irreducible polynomial found; unreachable for prime l")


def enumerate_elements(field: FiniteField) -> list[FieldElement]:
    """All q elements in code order: 0 first, 1 second, then the rest."""
    return list(field)


def frobenius(x: FieldElement) -> FieldElement:
    """x^l; iterating k times is the identity."""
    return FieldElement(x.field, x.field._frobenius(x.coeffs))
