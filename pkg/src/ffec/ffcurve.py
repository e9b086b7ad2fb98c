"""Short Weierstrass curves over a finite field: group law, orders, point counts."""

from __future__ import annotations

import math
import random

import numpy as np

from .errors import DomainError, ResourceError
from .gf import FiniteField, factor_int

EXHAUSTIVE_LIMIT = 10_000
COUNT_CAP = 5**8

Point = tuple[int, int] | None  # None is the point at infinity


class FFCurve:
    """y^2 = x^3 + a x + b over F, with a, b raw field ints."""

    def __init__(self, F: FiniteField, a: int, b: int):
        self.F, self.a, self.b = F, a, b

    def rhs(self, x: int) -> int:
        F = self.F
        return F.add(F.mul(F.add(F.mul(x, x), self.a), x), self.b)

    @property
    def disc(self) -> int:
        F = self.F
        a3 = F.mul(F.mul(self.a, self.a), self.a)
        return F.mul(F.from_int(-16), F.add(F.mul(F.from_int(4), a3), F.mul(F.from_int(27), F.mul(self.b, self.b))))

    def is_singular(self) -> bool:
        return self.disc == 0

    def contains(self, P: Point) -> bool:
        if P is None:
            return True
        x, y = P
        return self.F.mul(y, y) == self.rhs(x)

    def neg(self, P: Point) -> Point:
        return None if P is None else (P[0], self.F.neg(P[1]))

    def add(self, P: Point, Q: Point) -> Point:
        if P is None:
            return Q
        if Q is None:
            return P
        F = self.F
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if F.add(y1, y2) == 0:
                return None
            lam = F.div(F.add(F.mul(F.from_int(3), F.mul(x1, x1)), self.a), F.mul(F.from_int(2), y1))
        else:
            lam = F.div(F.sub(y2, y1), F.sub(x2, x1))
        x3 = F.sub(F.sub(F.mul(lam, lam), x1), x2)
        y3 = F.sub(F.mul(lam, F.sub(x1, x3)), y1)
        return (x3, y3)

    def mul(self, n: int, P: Point) -> Point:
        if n < 0:
            return self.mul(-n, self.neg(P))
        R: Point = None
        while n:
            if n & 1:
                R = self.add(R, P)
            n >>= 1
            if n:
                P = self.add(P, P)
        return R

    def order(self, P: Point, limit: int | None = None) -> int:
        """Exact order by repeated addition (small fields only)."""
        limit = limit or self.F.q + 1 + 2 * math.isqrt(self.F.q) + 2
        n, R = 1, P
        while R is not None:
            R = self.add(R, P)
            n += 1
            if n > limit:
                raise DomainError("point order exceeds the Hasse bound")
        return n

    def random_point(self, rng: random.Random) -> Point:
        F = self.F
        while True:
            x = rng.randrange(F.q)
            y = F.sqrt(self.rhs(x))
            if y is not None:
                return (x, y if rng.random() < 0.5 else F.neg(y))

    def points(self):
        """All points, O first (exhaustive, small fields)."""
        yield None
        F = self.F
        for x in range(F.q):
            r = self.rhs(x)
            y = F.sqrt(r)
            if y is None:
                continue
            yield (x, y)
            if y:
                yield (x, F.neg(y))

    # counting --------------------------------------------------------------
    def character_sum(self) -> int:
        """sum_x chi(x^3 + a x + b), vectorised over the whole field."""
        F = self.F
        xs = np.arange(F.q, dtype=np.int64)
        x2 = F.vec_mul(xs, xs)
        f = F.vec_mul(F.vec_add(x2, np.full_like(xs, self.a)), xs)
        f = F.vec_add(f, np.full_like(xs, self.b))
        return int(F.vec_chi(f).sum())

    def count_exhaustive(self) -> int:
        return self.F.q + 1 + self.character_sum()

    def count_bsgs(self, seed: int = 1, max_points: int = 40) -> int | None:
        """#E by baby-step giant-step in the Hasse interval; None if undecided."""
        Q = self.F.q
        w = 2 * math.isqrt(Q) + 2
        lo, hi = max(1, Q + 1 - w), Q + 1 + w
        rng = random.Random(seed)
        L = 1
        for _ in range(max_points):
            P = self.random_point(rng)
            L = math.lcm(L, self._point_order_bsgs(P, lo, hi))
            first = -(-lo // L) * L
            cands = [m for m in range(first, hi + 1, L) if abs(Q + 1 - m) ** 2 <= 4 * Q]
            if len(cands) == 1:
                return cands[0]
        return None

    def _point_order_bsgs(self, P: Point, lo: int, hi: int) -> int:
        m = math.isqrt(hi - lo) + 1
        baby: dict[Point, int] = {}
        R: Point = None
        for j in range(m):
            baby.setdefault(R, j)
            R = self.add(R, P)
        step = self.mul(m, P)
        T = self.mul(lo, P)
        M = None
        for i in range(m + 1):
            j = baby.get(self.neg(T))
            if j is not None:
                M = lo + i * m + j
                break
            T = self.add(T, step)
        if M is None:
            raise AssertionError("no multiple of the point order in the Hasse interval")
        order = M
        for r in factor_int(M):
            while order % r == 0 and self.mul(order // r, P) is None:
                order //= r
        return order

    def count(self, method: str = "auto") -> int:
        """Number of projective points over F (including O)."""
        if self.is_singular():
            return self.count_exhaustive()
        Q = self.F.q
        if Q > COUNT_CAP:
            raise ResourceError(f"field size {Q} exceeds the counting cap {COUNT_CAP}")
        if method == "exhaustive" or (method == "auto" and Q <= EXHAUSTIVE_LIMIT):
            return self.count_exhaustive()
        n = self.count_bsgs()
        return n if n is not None else self.count_exhaustive()
