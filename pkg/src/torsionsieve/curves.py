"""Elliptic curves over small finite fields: exact point counts and trace censuses.

A census records which Frobenius traces (equivalently group orders) are
realized by smooth Weierstrass models over F_q.  Only the realized SET
matters downstream, so models are enumerated raw, without isomorphism
dedup.  Two routes exist:

* a pure per-curve path (`point_count` over `enumerate_curves`), used as
  ground truth at small q and for spot checks;
* a vectorized fast path (`_fastcount`), used for family censuses up to
  q = 2^8 and full censuses up to q = 2^5.

`trace_census` always cross-checks a deterministic sample of the fast
path against the pure path; disagreement is a hard failure.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Literal

from . import _fastcount
from .fields import FieldElement, FiniteField, make_field
from .primes import is_prime

CENSUS_SCHEMA_VERSION = 1
FULL_MODE_CAP = 2**5
FAMILY_MODE_CAP_CHAR2 = 2**8
FAMILY_MODE_CAP_ODD = 3**5
CACHE_ENV_VAR = "TORSIONSIEVE_CACHE"

Mode = Literal["family", "full"]


class SingularCurveError(ValueError):
    """The Weierstrass model has vanishing discriminant."""


class CensusError(ValueError):
    """Invalid census parameters or a failed internal cross-check."""


@dataclass(frozen=True)
class CurveModel:
    """Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    field: FiniteField
    a1: FieldElement
    a2: FieldElement
    a3: FieldElement
    a4: FieldElement
    a6: FieldElement
    family_tag: str = "full"

    def __post_init__(self):
        if not self.discriminant():
            raise SingularCurveError(f"singular model over q={self.field.q}")

    def discriminant(self) -> FieldElement:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -(b2 * b2 * b8) - 8 * (b4 * b4 * b4) - 27 * (b6 * b6) + 9 * b2 * b4 * b6


def _solutions_char2_trace(C: CurveModel, x: FieldElement) -> int:
    """Number of y with y^2 + h(x) y = f(x), via the Artin-Schreier trace test."""
    F = C.field
    h = C.a1 * x + C.a3
    f = x * x * x + C.a2 * x * x + C.a4 * x + C.a6
    if not h:
        return 1  # squaring is a bijection in characteristic 2
    w = f / (h * h)
    return 2 if F.trace_bit(w.coeffs) == 0 else 0


def _solutions_yscan(C: CurveModel, x: FieldElement, elements=None) -> int:
    f = x * x * x + C.a2 * x * x + C.a4 * x + C.a6
    h = C.a1 * x + C.a3
    ys = elements if elements is not None else list(C.field)
    return sum(1 for y in ys if y * y + h * y == f)


def _solutions_odd(C: CurveModel, x: FieldElement) -> int:
    """Complete the square: (2y + h)^2 = h^2 + 4 f(x)."""
    F = C.field
    h = C.a1 * x + C.a3
    f = x * x * x + C.a2 * x * x + C.a4 * x + C.a6
    disc = h * h + 4 * f
    return 1 + F.quadratic_character(disc.coeffs)


def point_count(C: CurveModel, verify: bool | None = None) -> int:
    """#C(F_q), including the point at infinity, by exhaustive x-sweep.

    In characteristic 2 the quadratic in y is solved by the trace
    condition; with ``verify`` (default for q <= 2^10) every x is also
    solved by exhaustive y-scan and any disagreement raises.  The result
    is checked against the Hasse interval.
    """
    F = C.field
    if verify is None:
        verify = F.q <= 2**10
    per_x = _solutions_char2_trace if F.l == 2 else _solutions_odd
    elements = list(F)
    n = 1
    for x in elements:
        s = per_x(C, x)
        if verify:
            s2 = _solutions_yscan(C, x, elements)
            if s != s2:
                raise AssertionError(
                    f"quadratic-solver disagreement at x={x.code}: {s} vs {s2}"
                )
        n += s
    q = F.q
    half = math.isqrt(4 * q)
    if not (q + 1 - half <= n <= q + 1 + half):
        raise AssertionError(f"count {n} outside Hasse interval for q={q}")
    return n


def enumerate_curves(field: FiniteField, mode: Mode = "family") -> Iterator[CurveModel]:
    """Stream smooth models in deterministic coefficient-code order.

    family mode, char 2: the ordinary family y^2 + xy = x^3 + a2 x^2 + a6
    (a6 != 0) and the supersingular family y^2 + a3 y = x^3 + a4 x + a6
    (a3 != 0).  family mode, odd char: y^2 = x^3 + a x + b.  full mode
    (q <= 2^5): every smooth 5-coefficient model.

    Coefficient space chunks by leading coefficients, so disjoint code
    ranges can be counted on independent workers and unioned.
    """
    q = field.q
    zero, one = field.zero, field.one
    if mode == "full":
        if q > FULL_MODE_CAP:
            raise CensusError(f"full enumeration capped at q <= {FULL_MODE_CAP}")
        for c1 in range(q):
            for c2 in range(q):
                for c3 in range(q):
                    for c4 in range(q):
                        for c6 in range(q):
                            try:
                                yield CurveModel(
                                    field,
                                    field.element(c1),
                                    field.element(c2),
                                    field.element(c3),
                                    field.element(c4),
                                    field.element(c6),
                                    "full",
                                )
                            except SingularCurveError:
                                continue
    elif mode == "family":
        if field.l == 2:
            for c2 in range(q):
                for c6 in range(1, q):
                    yield CurveModel(
                        field, one, field.element(c2), zero, zero,
                        field.element(c6), "char2-ordinary",
                    )
            for c3 in range(1, q):
                for c4 in range(q):
                    for c6 in range(q):
                        yield CurveModel(
                            field, zero, zero, field.element(c3),
                            field.element(c4), field.element(c6),
                            "char2-supersingular",
                        )
        else:
            for c4 in range(q):
                for c6 in range(q):
                    try:
                        yield CurveModel(
                            field, zero, zero, zero,
                            field.element(c4), field.element(c6),
                            "odd-char-short",
                        )
                    except SingularCurveError:
                        continue
    else:
        raise CensusError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class TraceCensus:
    """Realized Frobenius traces and group orders over one field."""

    field: FiniteField
    realized_traces: tuple[int, ...]
    realized_orders: tuple[int, ...]
    method: str

    def __post_init__(self):
        q = self.field.q
        for a in self.realized_traces:
            if a * a > 4 * q:
                raise CensusError(f"trace {a} violates the Hasse bound for q={q}")
        expect = tuple(sorted(q + 1 - a for a in self.realized_traces))
        if expect != self.realized_orders:
            raise CensusError("orders and traces are not in bijection via N = q+1-a")


def extend_trace(a: int, q: int, m: int) -> int:
    """Trace over F_{q^m} of a base-changed curve with trace a over F_q.

    Weil-number recursion a_0 = 2, a_1 = a, a_j = a*a_{j-1} - q*a_{j-2}.
    """
    if a * a > 4 * q:
        raise CensusError(f"trace {a} violates the Hasse bound for q={q}")
    if m < 0:
        raise CensusError("extension degree must be nonnegative")
    prev, cur = 2, a
    if m == 0:
        return prev
    for _ in range(m - 1):
        prev, cur = cur, a * cur - q * prev
    return cur


def census_cache_dir(cache_dir: str | os.PathLike | None = None) -> Path:
    if cache_dir is not None:
        return Path(cache_dir)
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "torsionsieve"


def _census_path(root: Path, l: int, k: int, mode: str) -> Path:
    return root / f"census_l{l}_k{k}_{mode}.json"


def _compute_census_traces(field: FiniteField, mode: Mode) -> set[int]:
    """Fast-path census with a deterministic pure-path cross-check sample."""
    q = field.q
    if mode == "full":
        if q > FULL_MODE_CAP:
            raise CensusError(f"full enumeration capped at q <= {FULL_MODE_CAP}")
        counts = _fastcount.full_counts_char2(field) if field.l == 2 \
            else _fastcount.full_counts_odd(field)
    else:
        if field.l == 2:
            if q > FAMILY_MODE_CAP_CHAR2:
                raise CensusError(
                    f"char-2 family census capped at q <= {FAMILY_MODE_CAP_CHAR2}"
                )
            counts = _fastcount.family_counts_char2(field)
        else:
            if q > FAMILY_MODE_CAP_ODD:
                raise CensusError(
                    f"odd-characteristic family census capped at q <= {FAMILY_MODE_CAP_ODD}"
                )
            counts = _fastcount.family_counts_odd(field)
    _crosscheck_sample(field, mode)
    return {q + 1 - n for n in counts}


def _sample_models(field: FiniteField, mode: Mode, n: int) -> list[CurveModel]:
    """Deterministic pseudo-spread of valid models across the coefficient space."""
    q = field.q
    state = field.l * 2**20 + field.k * 2**10 + (1 if mode == "family" else 2)

    def nxt(m: int) -> int:
        nonlocal state
        state = (state * 1103515245 + 12345) % 2**31
        return state % m

    models: list[CurveModel] = []
    attempts = 0
    zero, one = field.zero, field.one
    while len(models) < n and attempts < 64 * n:
        attempts += 1
        try:
            if mode == "family" and field.l == 2:
                if len(models) % 2 == 0:
                    models.append(CurveModel(
                        field, one, field.element(nxt(q)), zero, zero,
                        field.element(1 + nxt(q - 1)), "char2-ordinary"))
                else:
                    models.append(CurveModel(
                        field, zero, zero, field.element(1 + nxt(q - 1)),
                        field.element(nxt(q)), field.element(nxt(q)),
                        "char2-supersingular"))
            elif mode == "family":
                models.append(CurveModel(
                    field, zero, zero, zero, field.element(nxt(q)),
                    field.element(nxt(q)), "odd-char-short"))
            else:
                models.append(CurveModel(
                    field, *(field.element(nxt(q)) for _ in range(5)), "full"))
        except SingularCurveError:
            continue
    return models


def _crosscheck_sample(field: FiniteField, mode: Mode, sample: int = 12) -> None:
    """Recount a deterministic model sample with the pure path.

    The fast path only reproduces per-model counts; equality of the full
    realized SETS against pure enumeration is exercised in the test suite
    at small q, where exhaustion is affordable.
    """
    models = _sample_models(field, mode, sample)
    if not models:
        raise CensusError("could not draw any smooth sample model")
    for i, C in enumerate(models):
        n_pure = point_count(C, verify=field.q <= 2**6)
        n_fast = _fastcount.single_count(C)
        if n_pure != n_fast:
            raise CensusError(
                f"fast-path disagreement on sample model #{i} over q={field.q}: "
                f"{n_fast} vs {n_pure}"
            )


def trace_census(
    l: int,
    k: int,
    mode: Mode = "family",
    cache_dir: str | os.PathLike | None = None,
    use_cache: bool = True,
) -> TraceCensus:
    """Census of realized traces over F_{l^k}, cached on disk.

    Cache files are keyed by (l, k, mode, modulus) and carry a schema
    version; stale or mismatching files are recomputed.
    """
    if not is_prime(l):
        raise CensusError(f"{l} is not prime")
    field = make_field(l, k)
    root = census_cache_dir(cache_dir)
    path = _census_path(root, l, k, mode)
    if use_cache and path.exists():
        try:
            payload = json.loads(path.read_text())
        except json.JSONDecodeError:
            payload = None
        if (
            payload
            and payload.get("schema_version") == CENSUS_SCHEMA_VERSION
            and payload.get("modulus") == list(field.modulus)
            and payload.get("mode") == mode
        ):
            traces = tuple(payload["traces"])
            return TraceCensus(
                field,
                traces,
                tuple(sorted(field.q + 1 - a for a in traces)),
                method=f"brute-force-{mode} (cached)",
            )
    traces = tuple(sorted(_compute_census_traces(field, mode)))
    census = TraceCensus(
        field,
        traces,
        tuple(sorted(field.q + 1 - a for a in traces)),
        method=f"brute-force-{mode}",
    )
    if use_cache:
        root.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps(
                {
                    "schema_version": CENSUS_SCHEMA_VERSION,
                    "l": l,
                    "k": k,
                    "mode": mode,
                    "modulus": list(field.modulus),
                    "traces": list(traces),
                },
                indent=0,
                sort_keys=True,
            )
            + "\n"
        )
        tmp.replace(path)
    return census


def derived_census(base: TraceCensus, m: int) -> TraceCensus:
    """Extension-derived census: traces of base-changed curves over F_{q^m}.

    A subset of the true census over F_{q^m}; used as a cross-check
    oracle, never as a substitute for brute force.
    """
    field = base.field
    ext = make_field(field.l, field.k * m)
    traces = tuple(sorted({extend_trace(a, field.q, m) for a in base.realized_traces}))
    return TraceCensus(
        ext,
        traces,
        tuple(sorted(ext.q + 1 - a for a in traces)),
        method="extension-derived",
    )
