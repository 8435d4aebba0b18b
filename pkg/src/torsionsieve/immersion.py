"""Formal-immersion rank checks on modular-symbol spaces, mod l.

The verdict for (p, d, l) at a level (X0 or an intermediate X_H) is a
GF(l) independence test on Hecke images of the 0->infinity path.  The
row recipe is a pluggable "criterion provider"; the default takes rows
T_j e for j over the cumulative part sums of each multiplicity pattern
(partition of d).  The provider choice is calibration-governed: it must
reproduce the known verified/not-verified split on the calibration
range, and a provider that fails calibration is wrong by definition.

The engine works directly with the mod-l reduction of the symbol
presentation.  In "saturated" form (the default) the classes that die
in the rational quotient (2-torsion from self-paired symbols, 3-torsion
from degenerate triangle orbits) are forced to zero, which matches the
image lattice of the rational space; the unsaturated form keeps them
(the raw cokernel).  Saturated-vs-lattice agreement is covered by tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2 import rank_gf2
from .modsym import (
    ZERO_GEN,
    DiamondSubgroup,
    SymbolClasses,
    SymbolSpaceError,
    full_subgroup,
    genus_oracle,
    heilbronn_merel,
)
from .primes import is_prime

ENGINE_LEVEL_CAP = 6750
ENGINE_CLASS_CAP = 40000


def partitions(d: int) -> list[tuple[int, ...]]:
    """Partitions of d, descending parts, deterministic order."""
    if d == 0:
        return [()]
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, maxpart: int, prefix: tuple[int, ...]):
        if remaining == 0:
            out.append(prefix)
            return
        for part in range(min(remaining, maxpart), 0, -1):
            rec(remaining - part, part, prefix + (part,))

    rec(d, d, ())
    return out


class ModLSymbolEngine:
    """Mod-l reduction of the Gamma_H symbol presentation at prime level p."""

    def __init__(self, p: int, H: DiamondSubgroup | None = None, l: int = 2,
                 saturate: bool = True):
        if not is_prime(p) or p == 2:
            raise SymbolSpaceError(f"level {p} must be an odd prime")
        if not is_prime(l) or l == p:
            raise SymbolSpaceError("auxiliary l must be prime and distinct from p")
        if H is None:
            H = full_subgroup(p)
        if p > ENGINE_LEVEL_CAP:
            raise SymbolSpaceError(f"engine level capped at p <= {ENGINE_LEVEL_CAP}")
        self.p = p
        self.H = H
        self.l = l
        self.saturate = saturate
        self.classes = SymbolClasses.build(p, H.units())
        n = len(self.classes.reps)
        if n > ENGINE_CLASS_CAP:
            raise SymbolSpaceError(
                f"{n} symbol classes exceed the engine cap {ENGINE_CLASS_CAP}"
            )
        self._build()

    # -- presentation --------------------------------------------------------

    def _build(self) -> None:
        classes = self.classes
        n = len(classes.reps)
        fold = [-2] * n  # -2 unset; ZERO_GEN dead; else folded rep id
        forced_zero: list[int] = []
        for i in range(n):
            if fold[i] != -2:
                continue
            j = classes.sigma(i)
            if j == i:
                if self.saturate and self.l == 2:
                    fold[i] = ZERO_GEN  # 2x = 0 dies in the rational quotient
                else:
                    fold[i] = i  # survives in the raw cokernel mod 2
            else:
                fold[i] = i
                fold[j] = i
        self.fold = fold

        alive = sorted({r for r in fold if r != ZERO_GEN})
        self.bitpos = {rep: idx for idx, rep in enumerate(alive)}
        self.n_alive = len(alive)

        rows: list[int] = []
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            j = classes.tau(i)
            k = classes.tau(j)
            seen[i] = seen[j] = seen[k] = True
            if j == i:
                # degenerate orbit: 3x = 0; forces x = 0 for l != 3, and in
                # the saturated (rational-quotient) reading for l = 3 too
                if fold[i] != ZERO_GEN:
                    rows.append(1 << self.bitpos[fold[i]])
                continue
            acc: dict[int, int] = {}
            for cid in (i, j, k):
                rep = fold[cid]
                if rep == ZERO_GEN:
                    continue
                acc[rep] = acc.get(rep, 0) + 1
            if self.l == 2:
                row = 0
                for rep, coeff in acc.items():
                    if coeff & 1:
                        row |= 1 << self.bitpos[rep]
                if row:
                    rows.append(row)
            else:
                raise SymbolSpaceError("only l = 2 is bit-packed; use dense path")
        self.relation_rows = rows
        self.pivots: dict[int, int] = {}
        for row in rows:
            self._insert(row)

    def _reduce(self, row: int) -> int:
        out = 0
        piv = self.pivots
        while row:
            b = row.bit_length() - 1
            pr = piv.get(b)
            if pr is None:
                bit = 1 << b
                out |= bit
                row ^= bit
            else:
                row ^= pr
        return out

    def _insert(self, row: int) -> bool:
        row = self._reduce(row)
        if row:
            self.pivots[row.bit_length() - 1] = row
            return True
        return False

    @property
    def dimension(self) -> int:
        return self.n_alive - len(self.pivots)

    # -- vectors -------------------------------------------------------------

    def fold_raw(self, raw: dict[int, int]) -> int:
        """Mod-2 fold of a raw class combination into an alive-rep bit row."""
        acc: dict[int, int] = {}
        for cid, coeff in raw.items():
            rep = self.fold[cid]
            if rep == ZERO_GEN:
                continue
            acc[rep] = acc.get(rep, 0) + coeff
        row = 0
        for rep, coeff in acc.items():
            if coeff & 1:
                row |= 1 << self.bitpos[rep]
        return row

    def path_raw(self) -> dict[int, int]:
        """The 0 -> infinity path: the Manin symbol of the identity coset."""
        cid = self.classes.index_of(0, 1)
        assert cid is not None
        return {cid: 1}

    def hecke_raw(self, raw: dict[int, int], n: int) -> dict[int, int]:
        """T_n on a raw class combination (Heilbronn-Merel sum, mod-p pairs)."""
        p = self.p
        out: dict[int, int] = {}
        lookup = self.classes.lookup
        reps = self.classes.reps
        for cid, coeff in raw.items():
            c, d = reps[cid]
            for a, b, cc, dd in heilbronn_merel(n):
                c1 = (c * a + d * cc) % p
                d1 = (c * b + d * dd) % p
                if c1 == 0 and d1 == 0:
                    continue
                j = lookup[c1 * p + d1]
                out[j] = out.get(j, 0) + coeff
        return out

    def reduced_hecke_path_rows(self, indices: list[int],
                                eta_prime: int | None = None) -> dict[int, int]:
        """Reduced bit rows T_j e (or T_j applied to (T_q - (q+1)) e)."""
        e = self.path_raw()
        if eta_prime is not None:
            te = self.hecke_raw(e, eta_prime)
            base: dict[int, int] = dict(te)
            mult = -(eta_prime + 1)
            for cid, coeff in e.items():
                base[cid] = base.get(cid, 0) + mult * coeff
        else:
            base = e
        return {
            j: self._reduce(self.fold_raw(self.hecke_raw(base, j)))
            for j in indices
        }


@dataclass(frozen=True)
class ImmersionVerdict:
    """Per-pattern and overall outcome of the rank check at one level."""

    p: int
    d: int
    l: int
    level_tag: str
    provider: str
    patterns_checked: tuple[tuple[int, ...], ...]
    pattern_pass: tuple[bool, ...]
    overall: str  # "verified" | "not_verified"
    genus: int
    odd_image_assumption: str = (
        "relies on the auxiliary quotient having odd rational image when l = 2; "
        "recorded, not checked here"
    )

    @property
    def verified(self) -> bool:
        return self.overall == "verified"


DEFAULT_PROVIDER = "cumulative-hecke"


def _provider_rows(provider: str, engine: ModLSymbolEngine, d: int
                   ) -> tuple[dict[int, int], str]:
    if provider == "cumulative-hecke":
        rows = engine.reduced_hecke_path_rows(list(range(1, d + 1)))
    elif provider == "cumulative-hecke-eta2":
        q = 2 if engine.p != 2 else 3
        rows = engine.reduced_hecke_path_rows(list(range(1, d + 1)), eta_prime=q)
    else:
        raise SymbolSpaceError(f"unknown criterion provider {provider!r}")
    return rows, provider


def formal_immersion_check(
    p: int,
    d: int,
    l: int = 2,
    H: DiamondSubgroup | None = None,
    provider: str = DEFAULT_PROVIDER,
    saturate: bool = True,
) -> ImmersionVerdict:
    """Rank test for every multiplicity pattern (partition of d).

    A pattern (m_1 >= m_2 >= ...) takes rows T_j e for j over the
    cumulative sums m_1, m_1 + m_2, ...; it passes iff the rows are
    independent mod 2.  Overall verdict is verified iff all patterns
    pass.  Genus 0 fails automatically: there is no immersion target.
    """
    if l != 2:
        raise SymbolSpaceError(
            "rank checks are pinned to the l = 2 reduction; other l would need "
            "a dense mod-l path that nothing downstream exercises"
        )
    if H is None:
        H = full_subgroup(p)
    if d < 1:
        raise SymbolSpaceError("degree must be positive")
    if d >= p:
        raise SymbolSpaceError("row indices must stay below the level")
    pats = tuple(partitions(d))
    g, _ = genus_oracle(p, H)
    if g == 0:
        return ImmersionVerdict(
            p, d, l, H.level_tag, provider, pats,
            tuple(False for _ in pats), "not_verified", g,
        )
    engine = ModLSymbolEngine(p, H, l=l, saturate=saturate)
    rows, provider_name = _provider_rows(provider, engine, d)
    passes = []
    for pat in pats:
        idx = []
        acc = 0
        for part in pat:
            acc += part
            idx.append(acc)
        sel = [rows[j] for j in idx]
        passes.append(rank_gf2(sel) == len(sel))
    overall = "verified" if all(passes) else "not_verified"
    return ImmersionVerdict(
        p, d, l, H.level_tag, provider_name, pats, tuple(passes), overall, g,
    )
