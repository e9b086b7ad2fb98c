"""Mordell-Weil lattices: Gram matrix, regulator, successive minima."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, IndependenceError, ResourceError
from .points import CurvePoint, canonical_height, height_pairing, is_torsion


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    @classmethod
    def around(cls, value, err=0) -> "Interval":
        value, err = Fraction(value), Fraction(err)
        return cls(value - err, value + err)

    def __add__(self, o: "Interval") -> "Interval":
        return Interval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, o: "Interval") -> "Interval":
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __mul__(self, o: "Interval") -> "Interval":
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(c), max(c))

    def scale(self, k: int) -> "Interval":
        return Interval(self.lo * k, self.hi * k) if k >= 0 else Interval(self.hi * k, self.lo * k)

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def rad(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi


def interval_det(M: Sequence[Sequence[Interval]]) -> Interval:
    """Determinant by cofactor expansion: every product is enclosed, so the
    result encloses det over all matrices inside the entrywise intervals."""
    n = len(M)
    if n == 0:
        return Interval(Fraction(1), Fraction(1))
    if n == 1:
        return M[0][0]
    total = Interval(Fraction(0), Fraction(0))
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * interval_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def exact_det(M: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(M)
    A = [list(map(Fraction, row)) for row in M]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    return det


def rank_of(vectors: Sequence[Sequence[int]]) -> int:
    rows = [list(map(Fraction, v)) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@dataclass
class MordellWeilLattice:
    points: list[CurvePoint]
    gram: list[list[Fraction]]
    errs: list[list[Fraction]]
    sublattice_caveat: bool = True

    @property
    def r(self) -> int:
        return len(self.points)

    @classmethod
    def from_gram(cls, gram, errs=None, caveat: bool = False) -> "MordellWeilLattice":
        """A lattice given only by its Gram matrix (used for synthetic checks)."""
        gram = [[Fraction(a) for a in row] for row in gram]
        r = len(gram)
        errs = errs or [[Fraction(0)] * r for _ in range(r)]
        return cls([None] * r, gram, [[Fraction(e) for e in row] for row in errs], caveat)

    @classmethod
    def from_points(cls, points: Sequence[CurvePoint], tol=Fraction(1, 10**8), method: str = "exact") -> "MordellWeilLattice":
        points = list(points)
        r = len(points)
        gram = [[Fraction(0)] * r for _ in range(r)]
        errs = [[Fraction(0)] * r for _ in range(r)]
        for i in range(r):
            h = canonical_height(points[i], tol, method)
            gram[i][i], errs[i][i] = h.value, h.error_bound
            for j in range(i + 1, r):
                pv = height_pairing(points[i], points[j], tol, method)
                gram[i][j] = gram[j][i] = pv.value
                errs[i][j] = errs[j][i] = pv.error_bound
        lat = cls(points, gram, errs)
        det = lat.regulator_interval()
        if r and det.lo <= 0:
            raise IndependenceError("Gram determinant does not exclude zero")
        return lat

    def entry(self, i: int, j: int) -> Interval:
        return Interval.around(self.gram[i][j], self.errs[i][j])

    def regulator_interval(self) -> Interval:
        if self.r == 0:
            return Interval(Fraction(1), Fraction(1))
        if all(e == 0 for row in self.errs for e in row):
            d = exact_det(self.gram)
            return Interval(d, d)
        return interval_det([[self.entry(i, j) for j in range(self.r)] for i in range(self.r)])

    def form(self, v: Sequence[int]) -> Fraction:
        g = self.gram
        return sum((g[i][j] * v[i] * v[j] for i in range(self.r) for j in range(self.r)), Fraction(0))

    def form_err(self, v: Sequence[int]) -> Fraction:
        e = self.errs
        return sum((e[i][j] * abs(v[i] * v[j]) for i in range(self.r) for j in range(self.r)), Fraction(0))

    def transform(self, U: Sequence[Sequence[int]]) -> "MordellWeilLattice":
        """Lattice with basis rows U * (basis); Gram U G U^T (errors propagated)."""
        r = self.r
        G = [[sum(U[i][a] * self.gram[a][b] * U[j][b] for a in range(r) for b in range(r)) for j in range(r)] for i in range(r)]
        Er = [[sum(abs(U[i][a] * U[j][b]) * self.errs[a][b] for a in range(r) for b in range(r)) for j in range(r)] for i in range(r)]
        pts = [None] * r
        return MordellWeilLattice(pts, [[Fraction(x) for x in row] for row in G], [[Fraction(x) for x in row] for row in Er], self.sublattice_caveat)


@dataclass(frozen=True)
class RegulatorValue:
    value: Fraction
    err: Fraction

    @property
    def lower(self) -> Fraction:
        return self.value - self.err

    @property
    def upper(self) -> Fraction:
        return self.value + self.err


def regulator(L: MordellWeilLattice) -> RegulatorValue:
    """det of the Gram matrix with an enclosing error bound; 1 for rank 0."""
    iv = L.regulator_interval()
    if L.r and iv.lo <= 0:
        raise IndependenceError("independence not certified: regulator interval contains 0")
    return RegulatorValue(iv.mid, iv.rad)


# ---------------------------------------------------------------------------


def _ldl(G: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """q with Q(v) = sum_i q[i][i] (v_i + sum_{j>i} q[i][j] v_j)^2."""
    r = len(G)
    q = [list(row) for row in G]
    for i in range(r):
        if q[i][i] <= 0:
            raise DomainError("Gram matrix is not positive definite")
        for j in range(i + 1, r):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, r):
            for l in range(k, r):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def short_vectors(G: Sequence[Sequence[Fraction]], bound: Fraction) -> list[tuple[Fraction, tuple[int, ...]]]:
    """All nonzero v (one of +-v) with v^T G v <= bound, exact (Fincke-Pohst)."""
    r = len(G)
    q = _ldl(G)
    out = []
    v = [0] * r

    def rec(i: int, remaining: Fraction):
        if i < 0:
            if any(v):
                out.append(tuple(v))
            return
        c = -sum((q[i][j] * v[j] for j in range(i + 1, r)), Fraction(0))
        s = math.sqrt(float(remaining / q[i][i])) if remaining > 0 else 0.0
        lo = math.floor(float(c) - s) - 1
        hi = math.ceil(float(c) + s) + 1
        for x in range(lo, hi + 1):
            t = q[i][i] * (x - c) ** 2
            if t <= remaining:
                v[i] = x
                rec(i - 1, remaining - t)
        v[i] = 0

    rec(r - 1, Fraction(bound))
    seen = set()
    uniq = []
    for w in out:
        key = max(w, tuple(-a for a in w))
        if key in seen:
            continue
        seen.add(key)
        val = sum((G[a][b] * key[a] * key[b] for a in range(r) for b in range(r)), Fraction(0))
        uniq.append((val, key))
    uniq.sort()
    return uniq


@dataclass
class MinimaProfile:
    values: list[Fraction]  # squared minima, i.e. form values
    errs: list[Fraction]
    vectors: list[tuple[int, ...]]

    @property
    def lambdas(self) -> list[float]:
        return [math.sqrt(float(v)) for v in self.values]


def successive_minima(L: MordellWeilLattice, r_cap: int = 4) -> MinimaProfile:
    r = L.r
    if r > r_cap:
        raise ResourceError(f"rank {r} exceeds the enumeration cap {r_cap}")
    if r == 0:
        return MinimaProfile([], [], [])
    bound = min(L.gram[i][i] for i in range(r))
    while True:
        chosen: list[tuple[int, ...]] = []
        vals: list[Fraction] = []
        for val, vec in short_vectors(L.gram, bound):
            if rank_of(chosen + [vec]) > len(chosen):
                chosen.append(vec)
                vals.append(val)
                if len(chosen) == r:
                    return MinimaProfile(vals, [L.form_err(v) for v in chosen], chosen)
        bound *= 2


@dataclass(frozen=True)
class MinkowskiReport:
    lhs: float
    rhs: float
    lhs_sq: Fraction
    rhs_sq: Fraction
    holds: bool

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def minkowski_check(L: MordellWeilLattice, minima: MinimaProfile | None = None) -> MinkowskiReport:
    """lambda_1 ... lambda_r <= r^{r/2} Reg^{1/2}, compared exactly in squares."""
    r = L.r
    if r < 1:
        raise DomainError("Minkowski check needs rank >= 1")
    minima = minima or successive_minima(L, r_cap=max(4, r))
    lhs_sq = Fraction(1)
    lhs_sq_hi = Fraction(1)
    for v, e in zip(minima.values, minima.errs):
        lhs_sq *= v
        lhs_sq_hi *= v + e
    reg = regulator(L)
    rhs_sq = Fraction(r**r) * reg.value
    rhs_sq_lo = Fraction(r**r) * reg.lower
    # refuted only if even the most favourable enclosure violates the inequality
    holds = lhs_sq - (lhs_sq_hi - lhs_sq) <= Fraction(r**r) * reg.upper
    return MinkowskiReport(math.sqrt(float(lhs_sq)), math.sqrt(float(rhs_sq)), lhs_sq, rhs_sq, bool(holds))


# ---------------------------------------------------------------------------


def independent_subset(points: Sequence[CurvePoint], tol=Fraction(1, 10**8), method: str = "exact", max_rank: int | None = None) -> list[CurvePoint]:
    """Greedy: walk the non-torsion points in order and keep those that raise
    the rank of the Gram matrix (independence certified by det > error)."""
    chosen: list[CurvePoint] = []
    for P in points:
        if P.is_zero() or is_torsion(P):
            continue
        trial = chosen + [P]
        try:
            MordellWeilLattice.from_points(trial, tol, method)
        except IndependenceError:
            continue
        chosen = trial
        if max_rank is not None and len(chosen) >= max_rank:
            break
    return chosen


def lattice_report(L: MordellWeilLattice) -> dict:
    reg = regulator(L)
    out = {
        "rank": L.r,
        "gram": [[str(a) for a in row] for row in L.gram],
        "regulator": {"value": float(reg.value), "exact": str(reg.value) if reg.err == 0 else None, "err": float(reg.err)},
        "lambdas": [],
        "minkowski": None,
        "sublattice_caveat": bool(L.sublattice_caveat and L.r > 0),
    }
    if L.r:
        mins = successive_minima(L, r_cap=max(4, L.r))
        out["lambdas"] = mins.lambdas
        out["minkowski"] = minkowski_check(L, mins).to_json()
    return out
