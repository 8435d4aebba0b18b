"""Weight-2 modular symbols at prime level: X0(p) and intermediate quotients.

Generators are Manin symbols: orbits of nonzero pairs (c, d) over F_p
under scaling by Hhat, the preimage in F_p^x of a subgroup H of
(Z/pZ)^x / {+-1}.  H full gives the p + 1 classes of P^1(F_p) (X0(p)
level); smaller H gives the intermediate curve X_H.  The presentation
imposes the standard 2-term and 3-term relations; the quotient has
dimension 2g + c - 1 (g the genus, c the cusp count), which is checked
at construction against an independent index/elliptic-point/cusp-count
formula.

All arithmetic is exact: integers where pivots allow, Fractions
otherwise.  No floating point enters anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .primes import is_prime

QQ = Fraction


class SymbolSpaceError(ValueError):
    """Invalid level/subgroup parameters or a failed construction invariant."""


FULL_H_LEVEL_CAP = 1000
PROPER_H_LEVEL_CAP = 250


# ---------------------------------------------------------------------------
# subgroups of (Z/pZ)^x / {+-1}
# ---------------------------------------------------------------------------


def _least_primitive_root(p: int) -> int:
    from .primes import prime_factors

    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in prime_factors(p - 1)):
            return g
    raise AssertionError(f"no primitive root mod {p}")


@dataclass(frozen=True)
class DiamondSubgroup:
    """Subgroup of G = (Z/pZ)^x / {+-1}, specified by its index.

    G is cyclic of order (p - 1)/2, so the index determines the subgroup.
    Index 1 is the full group (X0(p) level); index (p - 1)/2 is trivial
    (the +-quotient of X1(p) level).
    """

    p: int
    index: int

    def __post_init__(self):
        if not is_prime(self.p) or self.p == 2:
            raise SymbolSpaceError(f"level {self.p} must be an odd prime")
        n = (self.p - 1) // 2
        if self.index < 1 or n % self.index != 0:
            raise SymbolSpaceError(
                f"index {self.index} does not divide |G| = {n} for p = {self.p}"
            )

    @property
    def order(self) -> int:
        return (self.p - 1) // 2 // self.index

    def units(self) -> tuple[int, ...]:
        """Hhat: the preimage of H in F_p^x (always contains -1)."""
        p = self.p
        g = _least_primitive_root(p)
        h = pow(g, self.index, p)
        seen = {1, p - 1}
        cur = 1
        for _ in range(self.order):
            cur = (cur * h) % p
            seen.add(cur)
            seen.add(p - cur)
        return tuple(sorted(seen))

    def class_elements(self) -> tuple[int, ...]:
        """H itself, as canonical class representatives min(x, p - x)."""
        return tuple(sorted({min(u, self.p - u) for u in self.units()}))

    def contains_class(self, x: int) -> bool:
        return min(x % self.p, self.p - x % self.p) in self.class_elements()

    @property
    def level_tag(self) -> str:
        return "X0" if self.index == 1 else f"XH(index={self.index})"


def full_subgroup(p: int) -> DiamondSubgroup:
    return DiamondSubgroup(p, 1)


def subgroups_by_decreasing_index(p: int) -> list[DiamondSubgroup]:
    n = (p - 1) // 2
    divisors = sorted((m for m in range(1, n + 1) if n % m == 0), reverse=True)
    return [DiamondSubgroup(p, m) for m in divisors]


# ---------------------------------------------------------------------------
# genus / cusp-count oracle
# ---------------------------------------------------------------------------


def _sqrt_mod(a: int, p: int) -> int | None:
    for t in range(1, p):
        if (t * t - a) % p == 0:
            return t
    return None


def genus_oracle(p: int, H: DiamondSubgroup | None = None) -> tuple[int, int]:
    """(genus, cusp count) from the index/elliptic-point/cusp formula.

    Independent of the symbol presentation; used to validate it.
    """
    if p == 2:
        return 0, 2
    if p == 3:
        return 0, 2
    if H is None:
        H = full_subgroup(p)
    m = H.index
    mu = (p + 1) * m
    nu2 = 0
    if p % 4 == 1:
        i_class = _sqrt_mod(p - 1, p)
        assert i_class is not None
        nu2 = 2 * m if H.contains_class(i_class) else 0
    nu3 = 0
    if p % 3 == 1:
        zeta = None
        for t in range(2, p):
            if (t * t + t + 1) % p == 0:
                zeta = t
                break
        assert zeta is not None
        nu3 = 2 * m if H.contains_class(zeta) else 0
    nu_inf = 2 * m
    g = QQ(1) + QQ(mu, 12) - QQ(nu2, 4) - QQ(nu3, 3) - QQ(nu_inf, 2)
    if g.denominator != 1 or g < 0:
        raise AssertionError(f"genus formula returned {g} for p={p}, index={m}")
    return int(g), nu_inf


# ---------------------------------------------------------------------------
# Manin symbol classes and their fold/relation combinatorics
# ---------------------------------------------------------------------------


@dataclass
class SymbolClasses:
    """Orbits of nonzero (c, d) pairs under Hhat-scaling, with fast lookup."""

    p: int
    units: tuple[int, ...]
    reps: list[tuple[int, int]]
    lookup: dict[int, int]  # key c*p + d -> class id

    @classmethod
    def build(cls, p: int, units: tuple[int, ...]) -> "SymbolClasses":
        reps: list[tuple[int, int]] = []
        lookup: dict[int, int] = {}
        for c in range(p):
            base = c * p
            for d in range(p):
                if c == 0 and d == 0:
                    continue
                if base + d in lookup:
                    continue
                cid = len(reps)
                reps.append((c, d))
                for h in units:
                    lookup[((h * c) % p) * p + ((h * d) % p)] = cid
        return cls(p, units, reps, lookup)

    def index_of(self, c: int, d: int) -> int | None:
        c %= self.p
        d %= self.p
        if c == 0 and d == 0:
            return None
        return self.lookup[c * self.p + d]

    def sigma(self, cid: int) -> int:
        c, d = self.reps[cid]
        return self.lookup[(d % self.p) * self.p + ((-c) % self.p)]

    def tau(self, cid: int) -> int:
        c, d = self.reps[cid]
        return self.lookup[(d % self.p) * self.p + ((-c - d) % self.p)]


def p1_representatives(p: int) -> list[tuple[int, int]]:
    """Canonical representatives of P^1(F_p); exactly p + 1 classes.

    Class lookup for an arbitrary pair is constant-time via
    :func:`p1_index`.
    """
    if not is_prime(p):
        raise SymbolSpaceError(f"{p} is not prime")
    units = tuple(range(1, p))
    return SymbolClasses.build(p, units).reps


@lru_cache(maxsize=64)
def _p1_classes(p: int) -> SymbolClasses:
    units = tuple(range(1, p))
    return SymbolClasses.build(p, units)


def p1_index(p: int, c: int, d: int) -> int:
    """Index of (c : d) in the p1_representatives(p) list."""
    idx = _p1_classes(p).index_of(c, d)
    if idx is None:
        raise SymbolSpaceError(f"({c}, {d}) is zero mod {p}")
    return idx


# ---------------------------------------------------------------------------
# sparse exact elimination (pivot = largest column)
# ---------------------------------------------------------------------------


class SparseEchelon:
    """Incremental echelon over Q with pivot at each row's largest column.

    With this pivot choice every pivot row only references strictly
    smaller columns, so reduction of any vector terminates, and the
    non-pivot columns are precisely the generators independent of all
    earlier ones (the first-independent basis).
    """

    def __init__(self):
        self.pivot_rows: dict[int, dict[int, Fraction | int]] = {}

    def reduce(self, vec: dict[int, Fraction | int]) -> dict[int, Fraction | int]:
        vec = dict(vec)
        while True:
            hit = [c for c in vec if c in self.pivot_rows]
            if not hit:
                return vec
            c = max(hit)
            prow = self.pivot_rows[c]
            factor = QQ(vec[c], 1) / QQ(prow[c], 1)
            del vec[c]
            for col, coeff in prow.items():
                if col == c:
                    continue
                new = vec.get(col, 0) - factor * coeff
                if new:
                    vec[col] = new
                else:
                    vec.pop(col, None)
        # unreachable

    def insert(self, vec: dict[int, Fraction | int]) -> bool:
        """Reduce and adopt as a new pivot row; False if it reduced to zero."""
        red = self.reduce(vec)
        if not red:
            return False
        # normalize content to keep integer rows integer
        vals = list(red.values())
        if all(isinstance(v, int) or v.denominator == 1 for v in vals):
            ints = [int(v) for v in vals]
            g = 0
            for v in ints:
                g = math.gcd(g, v)
            if g > 1:
                red = {c: int(v) // g for c, v in red.items()}
            else:
                red = {c: int(v) for c, v in red.items()}
        self.pivot_rows[max(red)] = red
        return True

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)


# ---------------------------------------------------------------------------
# the symbol space
# ---------------------------------------------------------------------------


ZERO_GEN = -1


@dataclass
class SymbolSpace:
    """Presented weight-2 modular symbol space for Gamma_H at prime level p."""

    p: int
    H: DiamondSubgroup
    classes: SymbolClasses
    fold: list[tuple[int, int]]  # class id -> (folded rep, sign); rep ZERO_GEN if dead
    relation_rows: list[dict[int, int]]
    echelon: SparseEchelon
    basis: list[int]  # folded rep ids forming the quotient basis
    basis_pos: dict[int, int]
    cusp_reps: list[tuple[str, int]]
    boundary_rows: dict[int, dict[int, int]]  # folded rep -> sparse cusp row

    # -- construction -------------------------------------------------------

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def n_cusps(self) -> int:
        return len(self.cusp_reps)

    def fold_vector(self, raw: dict[int, Fraction | int]) -> dict[int, Fraction | int]:
        out: dict[int, Fraction | int] = {}
        for cid, coeff in raw.items():
            rep, sign = self.fold[cid]
            if rep == ZERO_GEN:
                continue
            new = out.get(rep, 0) + sign * coeff
            if new:
                out[rep] = new
            else:
                out.pop(rep, None)
        return out

    def reduce_raw(self, raw: dict[int, Fraction | int]) -> dict[int, Fraction]:
        """Coordinates of a raw symbol combination in the chosen basis."""
        red = self.echelon.reduce(self.fold_vector(raw))
        return {c: QQ(v) for c, v in red.items()}

    def coords(self, vec: dict[int, Fraction]) -> tuple[Fraction, ...]:
        return tuple(QQ(vec.get(b, 0)) for b in self.basis)

    # -- boundary ------------------------------------------------------------

    def boundary_of_coords(self, coords: Sequence[Fraction]) -> list[Fraction]:
        out = [QQ(0)] * self.n_cusps
        for pos, coeff in enumerate(coords):
            if not coeff:
                continue
            for cusp, mult in self.boundary_rows[self.basis[pos]].items():
                out[cusp] += coeff * mult
        return out

    def cuspidal_basis(self) -> list[tuple[Fraction, ...]]:
        """Basis of ker(boundary) in quotient coordinates."""
        rows = []
        for b in self.basis:
            row = [QQ(0)] * self.n_cusps
            for cusp, mult in self.boundary_rows[b].items():
                row[cusp] += mult
            rows.append(row)
        # kernel of the (dim x n_cusps) matrix whose rows are boundaries
        return _left_kernel(rows)


def _left_kernel(rows: list[list[Fraction]]) -> list[tuple[Fraction, ...]]:
    """Vectors v with sum_i v_i * rows[i] = 0, via exact column echelon."""
    n = len(rows)
    if n == 0:
        return []
    m = len(rows[0])
    # augment with identity; eliminate on the first m columns
    work = [list(map(QQ, rows[i])) + [QQ(1) if j == i else QQ(0) for j in range(n)]
            for i in range(n)]
    pivot_cols: list[int] = []
    r = 0
    for col in range(m):
        sel = None
        for i in range(r, n):
            if work[i][col]:
                sel = i
                break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        pv = work[r][col]
        for i in range(n):
            if i != r and work[i][col]:
                f = work[i][col] / pv
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivot_cols.append(col)
        r += 1
        if r == n:
            break
    kernel = []
    for i in range(r, n):
        if any(work[i][:m]):
            raise AssertionError("echelon failed")
        kernel.append(tuple(work[i][m:]))
    return kernel


def _lift_to_sl2(p: int, c: int, d: int) -> tuple[int, int, int, int]:
    """Integer matrix [a, b; C, D] in SL2(Z) with (C, D) = (c, d) mod p."""
    C = c % p
    D = d % p
    if C == 0:
        C = p
    if D == 0 and math.gcd(C, p) == 1:
        D = p
    t = 0
    while math.gcd(C, D + t * p) != 1:
        t += 1
        if t > C + 1:
            raise AssertionError("lift failed")
    D = D + t * p
    # a*D - b*C = 1
    g0, x, y = _xgcd(D, C)
    assert g0 == 1
    a, b = x, -y
    assert a * D - b * C == 1
    return a, b, C, D


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def build_space(p: int, H: DiamondSubgroup | str | None = None) -> SymbolSpace:
    """Presentation of the weight-2 symbol space for Gamma_H at level p.

    H may be a DiamondSubgroup, the string "full", or None (full).  The
    construction enforces, exactly: every relation has zero boundary,
    the cusp count matches the covering-degree formula, and the cuspidal
    dimension equals twice the genus from the independent oracle.
    """
    if not is_prime(p) or p == 2:
        raise SymbolSpaceError(f"level {p} must be an odd prime")
    if H is None or H == "full":
        H = full_subgroup(p)
    if not isinstance(H, DiamondSubgroup) or H.p != p:
        raise SymbolSpaceError("H must be a DiamondSubgroup for the same p")
    if H.index == 1:
        if p > FULL_H_LEVEL_CAP:
            raise SymbolSpaceError(f"full-H level capped at p <= {FULL_H_LEVEL_CAP}")
    elif p > PROPER_H_LEVEL_CAP:
        raise SymbolSpaceError(f"proper-H level capped at p <= {PROPER_H_LEVEL_CAP}")

    classes = SymbolClasses.build(p, H.units())
    n = len(classes.reps)

    # 2-term fold: x + x.sigma = 0
    fold: list[tuple[int, int]] = [(-2, 0)] * n
    for i in range(n):
        if fold[i] != (-2, 0):
            continue
        j = classes.sigma(i)
        if j == i:
            fold[i] = (ZERO_GEN, 0)  # 2x = 0 in the rational quotient
        else:
            fold[i] = (i, 1)
            fold[j] = (i, -1)

    # 3-term rows on folded generators: x + x.tau + x.tau^2 = 0
    echelon = SparseEchelon()
    relation_rows: list[dict[int, int]] = []
    seen_orbit = [False] * n
    for i in range(n):
        if seen_orbit[i]:
            continue
        j = classes.tau(i)
        k = classes.tau(j)
        seen_orbit[i] = seen_orbit[j] = seen_orbit[k] = True
        if j == i:
            # degenerate orbit: 3x = 0, so x dies rationally
            members = [i]
        else:
            members = [i, j, k]
        row: dict[int, int] = {}
        for cid in members:
            rep, sign = fold[cid]
            if rep == ZERO_GEN:
                continue
            row[rep] = row.get(rep, 0) + sign
        row = {c: v for c, v in row.items() if v}
        if j == i:
            # 3x = 0: the folded rep itself is forced to zero
            rep, sign = fold[i]
            if rep != ZERO_GEN:
                row = {rep: 1}
        if row:
            relation_rows.append(row)
            echelon.insert(row)

    alive = [i for i in range(n) if fold[i] == (i, 1)]
    basis = [i for i in alive if i not in echelon.pivot_rows]
    basis_pos = {b: pos for pos, b in enumerate(basis)}

    # cusps and boundary rows for every alive generator
    cusp_reps: list[tuple[str, int]] = []
    cusp_idx: dict[tuple[str, int], int] = {}
    units = H.units()

    def canon_unit(u: int) -> int:
        return min((h * u) % p for h in units)

    def cusp_id(r: int, s: int) -> int:
        smod = s % p
        key = ("inf", canon_unit(r % p)) if smod == 0 else ("zero", canon_unit(smod))
        if key not in cusp_idx:
            cusp_idx[key] = len(cusp_reps)
            cusp_reps.append(key)
        return cusp_idx[key]

    boundary_rows: dict[int, dict[int, int]] = {}
    for i in alive:
        c, d = classes.reps[i]
        a, b, C, D = _lift_to_sl2(p, c, d)
        # boundary of the path {g0, g.infinity}: (g0) - (g.infinity)
        row: dict[int, int] = {}
        for cusp, mult in ((cusp_id(b, D), 1), (cusp_id(a, C), -1)):
            row[cusp] = row.get(cusp, 0) + mult
        boundary_rows[i] = {k: v for k, v in row.items() if v}

    space = SymbolSpace(
        p, H, classes, fold, relation_rows, echelon, basis, basis_pos,
        cusp_reps, boundary_rows,
    )

    # construction invariants
    g, n_cusps = genus_oracle(p, H)
    if len(cusp_reps) != n_cusps:
        raise AssertionError(
            f"cusp count {len(cusp_reps)} != oracle {n_cusps} at p={p}, H={H.index}"
        )
    if space.dimension != 2 * g + n_cusps - 1:
        raise AssertionError(
            f"dimension {space.dimension} != 2g + c - 1 = {2 * g + n_cusps - 1} "
            f"at p={p}, H={H.index}"
        )
    for row in relation_rows:
        total: dict[int, int] = {}
        for rep, coeff in row.items():
            for cusp, mult in boundary_rows[rep].items():
                total[cusp] = total.get(cusp, 0) + coeff * mult
        if any(total.values()):
            raise AssertionError(f"relation with nonzero boundary at p={p}")
    return space


# ---------------------------------------------------------------------------
# Hecke operators via the Heilbronn-Merel family
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def heilbronn_merel(n: int) -> tuple[tuple[int, int, int, int], ...]:
    """The determinant-n integer matrix family computing T_n on Manin symbols."""
    mats: list[tuple[int, int, int, int]] = []
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                for b in range(a):
                    mats.append((a, b, 0, d))
                for c in range(1, d):
                    mats.append((a, 0, c, d))
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        mats.append((a, b, bc // b, d))
    return tuple(mats)


def _hecke_image_raw(space: SymbolSpace, cid: int, n: int) -> dict[int, int]:
    """Raw symbol combination T_n([cid]), before folding/reduction."""
    p = space.p
    c, d = space.classes.reps[cid]
    out: dict[int, int] = {}
    for a, b, cc, dd in heilbronn_merel(n):
        c1 = (c * a + d * cc) % p
        d1 = (c * b + d * dd) % p
        if c1 == 0 and d1 == 0:
            continue  # level-p terms drop out (U_p convention at n = p)
        j = space.classes.lookup[c1 * p + d1]
        out[j] = out.get(j, 0) + 1
    return out


def apply_hecke(space: SymbolSpace, vec: dict[int, Fraction], n: int) -> dict[int, Fraction]:
    """T_n applied to a vector in basis coordinates (sparse dict form)."""
    raw_acc: dict[int, Fraction] = {}
    for b, coeff in vec.items():
        if not coeff:
            continue
        for j, mult in _hecke_image_raw(space, b, n).items():
            new = raw_acc.get(j, QQ(0)) + coeff * mult
            if new:
                raw_acc[j] = new
            else:
                raw_acc.pop(j, None)
    return space.reduce_raw(raw_acc)


@dataclass(frozen=True)
class HeckeMatrix:
    """Exact rational matrix of T_n on the chosen basis (columns = images)."""

    space: SymbolSpace
    n: int
    matrix: tuple[tuple[Fraction, ...], ...]  # matrix[i][j] = coeff of basis i in T(basis j)

    def __matmul__(self, other: "HeckeMatrix") -> tuple[tuple[Fraction, ...], ...]:
        return _matmul(self.matrix, other.matrix)

    def trace(self) -> Fraction:
        return sum(self.matrix[i][i] for i in range(len(self.matrix)))


def _matmul(A, B):
    size = len(A)
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(size)) for j in range(size))
        for i in range(size)
    )


def hecke_operator(space: SymbolSpace, n: int) -> HeckeMatrix:
    """Matrix of T_n; at n = p this is the U_p convention (degenerate
    level-p terms dropped from the matrix family)."""
    if n < 1:
        raise SymbolSpaceError("Hecke index must be positive")
    dim = space.dimension
    cols = []
    for b in space.basis:
        img = space.reduce_raw(_hecke_image_raw(space, b, n))
        cols.append([QQ(img.get(bb, 0)) for bb in space.basis])
    matrix = tuple(tuple(cols[j][i] for j in range(dim)) for i in range(dim))
    return HeckeMatrix(space, n, matrix)


# ---------------------------------------------------------------------------
# the 0 -> infinity path and its cuspidal projection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathVector:
    space: SymbolSpace
    coords: tuple[Fraction, ...]
    cuspidal_projection: tuple[Fraction, ...]


def eisenstein_path(space: SymbolSpace, aux_prime: int | None = None) -> PathVector:
    """The geodesic path {0, infinity} in basis coordinates, plus its
    projection to the cuspidal subspace along the Hecke-stable complement.

    The projection solves P(T_q) w = P(T_q) e inside the complement,
    where P is the characteristic polynomial of T_q on the cuspidal
    subspace and q the smallest prime distinct from p; eigenvalue bounds
    keep the two spectra disjoint, so the solution is unique.
    """
    p = space.p
    if aux_prime is None:
        aux_prime = 2 if p != 2 else 3
    cid = space.classes.index_of(0, 1)
    assert cid is not None
    vec = space.reduce_raw({cid: 1})
    coords = space.coords(vec)
    dim = space.dimension
    if dim == 0:
        return PathVector(space, coords, tuple())
    cusp_basis = space.cuspidal_basis()
    if not cusp_basis:
        return PathVector(space, coords, tuple(QQ(0) for _ in range(dim)))
    T = hecke_operator(space, aux_prime).matrix
    P = _charpoly_on_subspace(T, cusp_basis)
    # P(T) kills the cuspidal subspace and is invertible on the stable
    # complement (eigenvalue bounds separate the spectra), so im P(T) IS
    # the complement; solve P(T) w = P(T) e there and subtract.
    PT = _poly_of_matrix(P, T)
    Pe = _matvec(PT, coords)
    eis_basis = _column_space_basis(PT)
    if len(eis_basis) != space.n_cusps - 1:
        raise AssertionError(
            f"stable complement has dimension {len(eis_basis)}, "
            f"expected {space.n_cusps - 1}"
        )
    w = _solve_in_span(PT, eis_basis, Pe)
    cuspidal = tuple(a - b for a, b in zip(coords, w))
    bnd = space.boundary_of_coords(cuspidal)
    if any(bnd):
        raise AssertionError("cuspidal projection has nonzero boundary")
    return PathVector(space, coords, cuspidal)


def _matvec(A, v):
    return tuple(sum(A[i][j] * v[j] for j in range(len(v))) for i in range(len(A)))


def _poly_of_matrix(coeffs: Sequence[Fraction], A):
    """coeffs[0] + coeffs[1] x + ... evaluated at the matrix A."""
    size = len(A)
    ident = tuple(tuple(QQ(1) if i == j else QQ(0) for j in range(size)) for i in range(size))
    out = tuple(tuple(QQ(0) for _ in range(size)) for _ in range(size))
    power = ident
    for c in coeffs:
        if c:
            out = tuple(
                tuple(out[i][j] + c * power[i][j] for j in range(size))
                for i in range(size)
            )
        power = _matmul(power, A)
    return out


def _charpoly_on_subspace(T, sub_basis: list[tuple[Fraction, ...]]) -> list[Fraction]:
    """Characteristic polynomial (low-degree-first) of T restricted to a
    T-stable subspace given by spanning vectors."""
    # restrict: solve T b_i = sum c_ji b_j
    k = len(sub_basis)
    cols = []
    for b in sub_basis:
        img = _matvec(T, b)
        cols.append(_express_in_basis(sub_basis, img))
    M = [[cols[j][i] for j in range(k)] for i in range(k)]
    return _charpoly(M)


def _express_in_basis(basis_vecs: list[tuple[Fraction, ...]], target) -> list[Fraction]:
    n = len(target)
    k = len(basis_vecs)
    aug = [[basis_vecs[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    sol = [QQ(0)] * k
    r = 0
    pivots = []
    for col in range(k):
        sel = None
        for i in range(r, n):
            if aug[i][col]:
                sel = i
                break
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        pv = aug[r][col]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    for i in range(r, n):
        if aug[i][k]:
            raise AssertionError("vector not in span")
    for row, col in enumerate(pivots):
        sol[col] = aug[row][k]
    return sol


def _charpoly(M: list[list[Fraction]]) -> list[Fraction]:
    """Characteristic polynomial via Newton's identities on power sums.

    Exact over Q; coefficients returned low-degree-first, monic.
    """
    n = len(M)
    if n == 0:
        return [QQ(1)]
    power = [row[:] for row in M]
    psums = []
    for _ in range(n):
        psums.append(sum(power[i][i] for i in range(n)))
        power = [
            [sum(M[i][t] * power[t][j] for t in range(n)) for j in range(n)]
            for i in range(n)
        ]
    e = [QQ(1)]
    for k in range(1, n + 1):
        acc = QQ(0)
        for i in range(1, k + 1):
            acc += ((-1) ** (i - 1)) * e[k - i] * psums[i - 1]
        e.append(acc / k)
    out = [QQ(0)] * (n + 1)
    for k in range(n + 1):
        out[n - k] = ((-1) ** k) * e[k]
    return out


def _column_space_basis(A) -> list[tuple[Fraction, ...]]:
    """Greedy independent subset of the columns of A, in column order."""
    n = len(A)
    cols = [tuple(A[i][j] for i in range(n)) for j in range(n)]
    chosen: list[list[Fraction]] = []
    out = []
    for col in cols:
        if any(col) and _rank_dense(chosen + [list(col)]) > len(out):
            chosen.append(list(col))
            out.append(col)
    return out


def _rank_dense(rows: list[list[Fraction]]) -> int:
    if not rows:
        return 0
    work = [list(map(QQ, r)) for r in rows]
    n, m = len(work), len(work[0])
    r = 0
    for col in range(m):
        sel = None
        for i in range(r, n):
            if work[i][col]:
                sel = i
                break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        pv = work[r][col]
        for i in range(n):
            if i != r and work[i][col]:
                f = work[i][col] / pv
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        if r == n:
            break
    return r


def _solve_in_span(A, span: list[tuple[Fraction, ...]], target) -> tuple[Fraction, ...]:
    """w in span(span) with A w = target."""
    images = [_matvec(A, v) for v in span]
    coeffs = _express_in_basis([tuple(x) for x in images], tuple(target))
    dim = len(target)
    w = [QQ(0)] * dim
    for c, v in zip(coeffs, span):
        if c:
            for i in range(dim):
                w[i] += c * v[i]
    return tuple(w)
