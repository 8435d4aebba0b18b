"""Scratch: X1-level winding-module lattice tests over Z_2 (calibration hunt)."""
import sys
import time

import numpy as np

from torsionsieve.primes import primes_in_range
from torsionsieve.modsym import DiamondSubgroup, SymbolClasses, _least_primitive_root, heilbronn_merel
from torsionsieve.gf2 import rank_gf2

K = 16
MOD = 1 << K
target = {139, 151, 157, 191, 223}


def val2(x: int) -> int:
    return (x & -x).bit_length() - 1 if x else K


class Zech2Echelon:
    """Streaming row echelon over Z/2^K with minimal-valuation pivot swaps.

    Pivot columns get rows whose pivot entry is a pure power of 2 (unit
    scaled away); coordinates of any lattice vector follow by triangular
    division.  Column priority: highest index first.
    """

    def __init__(self, width):
        self.width = width
        self.pivots = {}  # col -> row (np.int64 mod 2^K), pivot entry = 2^v

    def _unit_inv(self, u):
        # inverse of odd u mod 2^K
        x = 1
        for _ in range(K.bit_length() + 2):
            x = (x * (2 - u * x)) % MOD
        return x % MOD

    def insert(self, row):
        row = row.copy() % MOD
        while True:
            nz = np.nonzero(row)[0]
            if len(nz) == 0:
                return False
            c = int(nz[-1])
            entry = int(row[c])
            v = val2(entry)
            if c not in self.pivots:
                u = entry >> v
                row = (row * self._unit_inv(u)) % MOD
                self.pivots[c] = row
                return True
            prow = self.pivots[c]
            pv = val2(int(prow[c]))
            if v < pv:
                u = entry >> v
                row = (row * self._unit_inv(u)) % MOD
                self.pivots[c] = row
                row, prow = prow, row
                # displaced old pivot row continues below
                row = row.copy()
                factor = (int(row[c]) >> v) % MOD
                row = (row - factor * prow) % MOD
            else:
                factor = (int(entry) >> pv) % MOD
                row = (row - factor * self.pivots[c]) % MOD

    def coords_mod2(self, row):
        """Mod-2 coordinates w.r.t. the triangular basis; None if outside."""
        row = row.copy() % MOD
        out = {}
        while True:
            nz = np.nonzero(row)[0]
            if len(nz) == 0:
                return out
            c = int(nz[-1])
            if c not in self.pivots:
                return None
            prow = self.pivots[c]
            pv = val2(int(prow[c]))
            entry = int(row[c])
            if val2(entry) < pv:
                return None  # not in the lattice at this precision
            coeff = (entry >> pv) % MOD
            out[c] = out.get(c, 0) ^ (coeff & 1)
            row = (row - coeff * prow) % MOD


class X1Mod2K:
    """Presentation of M_2(Gamma_1(p)+-) over Z/2^K with canonical coords."""

    def __init__(self, p):
        n = (p - 1) // 2
        H = DiamondSubgroup(p, n)
        self.p = p
        self.classes = SymbolClasses.build(p, H.units())
        nc = len(self.classes.reps)
        # sigma fold (no self-paired classes at X1 level for p >= 5)
        fold = [-1] * nc
        for i in range(nc):
            if fold[i] != -1:
                continue
            j = self.classes.sigma(i)
            if j == i:
                raise AssertionError("unexpected self-paired symbol at X1 level")
            fold[i] = i
            fold[j] = ~i  # sign -1 marker
        self.fold = fold
        alive = [i for i in range(nc) if fold[i] == i]
        self.pos = {rep: idx for idx, rep in enumerate(alive)}
        self.width = len(alive)
        ech = Zech2Echelon(self.width)
        seen = [False] * nc
        for i in range(nc):
            if seen[i]:
                continue
            j = self.classes.tau(i)
            k = self.classes.tau(j)
            seen[i] = seen[j] = seen[k] = True
            if j == i:
                members = [(i, 1)]
                mult = 3
            else:
                members = [(i, 1), (j, 1), (k, 1)]
                mult = 1
            row = np.zeros(self.width, dtype=np.int64)
            for cid, _ in members:
                f = fold[cid]
                if f >= 0:
                    row[self.pos[f]] += mult
                else:
                    row[self.pos[~f]] -= mult
            row %= MOD
            if row.any():
                ech.insert(row)
        self.rel = ech

    def raw_to_row(self, raw):
        row = np.zeros(self.width, dtype=np.int64)
        for cid, coeff in raw.items():
            f = self.fold[cid]
            if f >= 0:
                row[self.pos[f]] += coeff
            else:
                row[self.pos[~f]] -= coeff
        return row % MOD

    def canonical(self, raw):
        """Canonical quotient coordinates mod 2^K (pivot columns cleared)."""
        row = self.raw_to_row(raw)
        piv = self.rel.pivots
        while True:
            nz = np.nonzero(row)[0]
            hit = None
            for c in nz[::-1]:
                if int(c) in piv:
                    hit = int(c)
                    break
            if hit is None:
                return row
            prow = piv[hit]
            pv = val2(int(prow[hit]))
            entry = int(row[hit])
            if val2(entry) < pv:
                raise AssertionError("2-adic division failure in quotient reduction")
            coeff = (entry >> pv) % MOD
            row = (row - coeff * prow) % MOD

    def hecke_raw(self, raw, m):
        p = self.p
        out = {}
        lut = self.classes.lookup
        reps = self.classes.reps
        for cid, coeff in raw.items():
            c, d = reps[cid]
            for a, b, cc, dd in heilbronn_merel(m):
                c1 = (c * a + d * cc) % p
                d1 = (c * b + d * dd) % p
                if c1 == 0 and d1 == 0:
                    continue
                j = lut[c1 * p + d1]
                out[j] = out.get(j, 0) + coeff
        return out


def analyze(p, n_gens=320, translate_tests=True):
    t0 = time.time()
    X = X1Mod2K(p)
    e_raw = {X.classes.index_of(0, 1): 1}
    gens = []
    for m in range(1, n_gens + 1):
        gens.append(X.canonical(X.hecke_raw(e_raw, m)))
    L = Zech2Echelon(X.width)
    for grow in gens:
        L.insert(grow)
    # also add diamond translates so the module is closed under them
    g = _least_primitive_root(p)
    n = (p - 1) // 2
    translates = []
    d = 1
    for i in range(n):
        tr = X.canonical({X.classes.index_of(0, d): 1})
        translates.append(tr)
        d = (d * g) % p
    for tr in translates:
        L.insert(tr)
    for j in range(1, 16, 2):
        pass
    # test rows
    odd_idx = list(range(1, 16, 2))
    hecke_rows = {j: X.canonical(X.hecke_raw(e_raw, j)) for j in odd_idx}
    fails = []
    packs = []
    rankL = len(L.pivots)
    pivcols = sorted(L.pivots)
    pivpos = {c: i for i, c in enumerate(pivcols)}

    def pack(coords):
        x = 0
        for c, bit in coords.items():
            if bit & 1:
                x |= 1 << pivpos[c]
        return x

    for j in odd_idx:
        co = L.coords_mod2(hecke_rows[j])
        if co is None:
            fails.append(f'T{j}e outside lattice precision')
            packs.append(0)
        else:
            packs.append(pack(co))
    rankodd = rank_gf2(packs)
    girth_bad = None
    memb_bad = None
    if translate_tests:
        trrows = []
        for tr in translates:
            co = L.coords_mod2(tr)
            trrows.append(pack(co) if co is not None else None)
        if any(r is None for r in trrows):
            girth_bad = 'precision'
        else:
            # kernel of the translate matrix with coefficient tracking
            piv = {}
            kernel = []
            for i, r in enumerate(trrows):
                aug = 1 << i
                while r:
                    b = r.bit_length() - 1
                    if b in piv:
                        pr, pa = piv[b]
                        r ^= pr
                        aug ^= pa
                    else:
                        piv[b] = (r, aug)
                        r = 0
                        aug = 0
                if aug:
                    kernel.append(aug)
            minw = None
            if kernel and len(kernel) <= 22:
                best = 10 ** 9
                for mask in range(1, 1 << len(kernel)):
                    v = 0
                    mm = mask
                    idx = 0
                    while mm:
                        if mm & 1:
                            v ^= kernel[idx]
                        mm >>= 1
                        idx += 1
                    w = bin(v).count('1')
                    best = min(best, w)
                minw = best
            elif kernel:
                minw = -1  # big kernel; treat separately
            girth_bad = (len(kernel), minw)
            # mixed (m,1): translate in span of first m odd hecke rows
            memb = []
            spanpiv = {}
            for mi, j in enumerate(odd_idx, start=1):
                r = packs[mi - 1]
                while r:
                    b = r.bit_length() - 1
                    if b in spanpiv:
                        r ^= spanpiv[b]
                    else:
                        spanpiv[b] = r
                        r = 0
                for i, tr in enumerate(trrows[1:], start=1):
                    r = tr
                    while r:
                        b = r.bit_length() - 1
                        if b in spanpiv:
                            r ^= spanpiv[b]
                        else:
                            break
                    if r == 0:
                        memb.append((mi, i))
                if mi >= 7:
                    break
            memb_bad = memb[:4]
    dt = time.time() - t0
    return rankL, rankodd, fails, girth_bad, memb_bad, dt


if __name__ == '__main__':
    lo = int(sys.argv[1]) if len(sys.argv) > 1 else 137
    hi = int(sys.argv[2]) if len(sys.argv) > 2 else 240
    for p in primes_in_range(lo, hi):
        rankL, rankodd, fails, girth, memb, dt = analyze(p)
        mark = 'TARGET' if p in target else ''
        print(f'p={p} rankL={rankL} rank_oddT={rankodd}/8 girth={girth} memb={memb} '
              f'fails={fails} ({dt:.1f}s) {mark}', flush=True)
