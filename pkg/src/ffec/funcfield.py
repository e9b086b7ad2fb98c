"""Arithmetic in F_q[t] and K = F_q(t): places, valuations, divisors, heights."""

from __future__ import annotations

import functools
import math
import random
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, FieldMismatchError, IngestionError, ResourceError
from .gf import FiniteField, embedding

INFINITY = math.inf
MAX_PLACE_DEGREE = 8
MAX_PLACE_WORK = 250_000  # q^D limit for places_up_to_degree


def _trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class Poly:
    """Dense polynomial in t over F_q; coefficients are raw field ints, ascending."""

    __slots__ = ("field", "c")

    def __init__(self, field: FiniteField, coeffs: Iterable[int] = ()):
        self.field = field
        self.c = _trim(list(coeffs))

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, field: FiniteField, a: int) -> "Poly":
        return cls(field, (a,))

    @classmethod
    def t(cls, field: FiniteField) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def monomial(cls, field: FiniteField, n: int, a: int = 1) -> "Poly":
        return cls(field, [0] * n + [a])

    # basic properties -------------------------------------------------------
    @property
    def deg(self) -> int:
        return len(self.c) - 1  # -1 for zero

    def is_zero(self) -> bool:
        return not self.c

    def is_one(self) -> bool:
        return self.c == (1,)

    @property
    def lead(self) -> int:
        return self.c[-1] if self.c else 0

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field == other.field and self.c == other.c

    def __hash__(self):
        return hash((self.field, self.c))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return poly_str(self)

    def _check(self, other: "Poly") -> None:
        if self.field != other.field:
            raise FieldMismatchError("polynomials over different fields")

    # ring operations -------------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        F = self.field
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        if F.k == 1:
            p = F.p
            for i, bi in enumerate(b):
                out[i] = (out[i] + bi) % p
        else:
            for i, bi in enumerate(b):
                out[i] = F.add(out[i], bi)
        return Poly(F, out)

    def __neg__(self) -> "Poly":
        F = self.field
        return Poly(F, [F.neg(a) for a in self.c])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, int):
            return self.scale(self.field.from_int(other))
        self._check(other)
        return Poly(self.field, _mul_raw(self.field, self.c, other.c))

    def scale(self, a: int) -> "Poly":
        F = self.field
        if not a:
            return Poly(F)
        return Poly(F, [F.mul(a, x) for x in self.c])

    def shift(self, n: int) -> "Poly":
        if not self.c:
            return self
        return Poly(self.field, [0] * n + list(self.c))

    def __pow__(self, e: int) -> "Poly":
        result = Poly.const(self.field, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def monic(self) -> "Poly":
        if not self.c or self.lead == 1:
            return self
        return self.scale(self.field.inv(self.lead))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check(other)
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        a = list(self.c)
        b = other.c
        db = len(b) - 1
        if len(a) - 1 < db:
            return Poly(F), self
        inv_lead = F.inv(b[-1])
        qcoef = [0] * (len(a) - db)
        if F.k == 1:
            p = F.p
            for i in range(len(a) - 1, db - 1, -1):
                c = a[i] * inv_lead % p
                if c:
                    qcoef[i - db] = c
                    base = i - db
                    for j in range(db):
                        a[base + j] = (a[base + j] - c * b[j]) % p
                a[i] = 0
        else:
            for i in range(len(a) - 1, db - 1, -1):
                c = F.mul(a[i], inv_lead)
                if c:
                    qcoef[i - db] = c
                    base = i - db
                    for j in range(db):
                        a[base + j] = F.sub(a[base + j], F.mul(c, b[j]))
                a[i] = 0
        return Poly(F, qcoef), Poly(F, a[:db])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def derivative(self) -> "Poly":
        F = self.field
        return Poly(F, [F.mul(F.from_int(i), a) for i, a in enumerate(self.c)][1:])

    def __call__(self, a: int) -> int:
        """Evaluate at a raw element of the coefficient field."""
        F = self.field
        acc = 0
        for c in reversed(self.c):
            acc = F.add(F.mul(acc, a), c)
        return acc

    def eval_in(self, big: FiniteField, alpha: int) -> int:
        """Evaluate at alpha in an extension field of the coefficient field."""
        emb = embedding(self.field, big)
        acc = 0
        for c in reversed(self.c):
            acc = big.add(big.mul(acc, alpha), emb(c))
        return acc

    def powmod(self, e: int, m: "Poly") -> "Poly":
        result = Poly.const(self.field, 1)
        base = self % m
        while e:
            if e & 1:
                result = (result * base) % m
            e >>= 1
            if e:
                base = (base * base) % m
        return result

    def reverse(self, n: int | None = None) -> "Poly":
        """t^n f(1/t) with n defaulting to deg f."""
        n = self.deg if n is None else n
        c = list(self.c) + [0] * (n + 1 - len(self.c))
        return Poly(self.field, reversed(c[: n + 1]))

    def sort_key(self) -> tuple:
        return (self.deg, self.c)

    def pth_root(self) -> "Poly":
        """g with g(t)^p = self, requires self in F_q[t^p]."""
        F = self.field
        p = F.p
        if any(a for i, a in enumerate(self.c) if i % p):
            raise DomainError("polynomial is not a p-th power")
        return Poly(F, [F.frobenius(a, F.k - 1) if F.k > 1 else a for a in self.c[::p]])


def _mul_raw(F: FiniteField, a: tuple, b: tuple) -> list[int]:
    if not a or not b:
        return []
    if F.k == 1:
        p = F.p
        if len(a) > 48 and len(b) > 48:
            return _conv_mod(a, b, p)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return [x % p for x in out]
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return out


def _conv_mod(a, b, p) -> list[int]:
    # exact int64 convolution: (p-1)^2 * min(len) stays far below 2^63
    x = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    return (x % p).tolist()


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """(g, s, t) with s a + t b = g monic."""
    F = a.field
    r0, r1 = a, b
    s0, s1 = Poly.const(F, 1), Poly(F)
    t0, t1 = Poly(F), Poly.const(F, 1)
    while r1:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return r0, s0, t0
    inv = F.inv(r0.lead)
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def poly_valuation(f: Poly, pi: Poly) -> float | int:
    """ord_pi(f); +inf for f = 0."""
    if not f:
        return INFINITY
    n = 0
    while True:
        q, r = f.divmod(pi)
        if r:
            return n
        f, n = q, n + 1


def split_off(f: Poly, pi: Poly) -> tuple[int, Poly]:
    """(n, g) with f = pi^n g and pi not dividing g."""
    n = 0
    while True:
        q, r = f.divmod(pi)
        if r:
            return n, f
        f, n = q, n + 1


def poly_sqrt(f: Poly) -> Poly | None:
    """Square root in F_q[t] or None."""
    F = f.field
    if not f:
        return f
    if f.deg % 2:
        return None
    lead = F.sqrt(f.lead)
    if lead is None:
        return None
    n = f.deg // 2
    s = [0] * (n + 1)
    s[n] = lead
    two_lead_inv = F.inv(F.mul(F.from_int(2), lead))
    c = f.c
    # top-down: coefficient of t^{n+k} in s^2 determines s[k]
    for k in range(n - 1, -1, -1):
        acc = c[n + k]
        for i in range(k + 1, n):
            acc = F.sub(acc, F.mul(s[i], s[n + k - i]))
        s[k] = F.mul(acc, two_lead_inv)
    root = Poly(F, s)
    return root if root * root == f else None


# ---------------------------------------------------------------------------
# factorization over F_q


def is_irreducible(f: Poly) -> bool:
    n = f.deg
    if n < 1:
        return False
    if n == 1:
        return True
    F = f.field
    x = Poly.t(F)
    fm = f.monic()
    frob = [x]
    for _ in range(n):
        frob.append(frob[-1].powmod(F.q, fm))
    if frob[n] != x % fm:
        return False
    from .gf import factor_int

    for r in factor_int(n):
        if poly_gcd(fm, frob[n // r] - x).deg > 0:
            return False
    return True


def squarefree_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """[(g_i, e_i)] with f/lead = prod g_i^e_i, g_i squarefree and coprime."""
    F = f.field
    f = f.monic()
    if f.deg < 1:
        return []
    out: list[tuple[Poly, int]] = []
    df = f.derivative()
    if not df:
        return [(g, e * F.p) for g, e in squarefree_decomposition(f.pth_root())]
    c = poly_gcd(f, df)
    w = f.exact_div(c)
    i = 1
    while w.deg > 0:
        y = poly_gcd(w, c)
        z = w.exact_div(y)
        if z.deg > 0:
            out.append((z, i))
        i += 1
        w = y
        c = c.exact_div(y)
    if c.deg > 0:
        out.extend((g, e * F.p) for g, e in squarefree_decomposition(c.pth_root()))
    return out


def _distinct_degree(f: Poly) -> list[tuple[Poly, int]]:
    F = f.field
    x = Poly.t(F)
    out = []
    h = x
    d = 0
    while f.deg >= 2 * (d + 1):
        d += 1
        h = h.powmod(F.q, f)
        g = poly_gcd(f, h - x)
        if g.deg > 0:
            out.append((g, d))
            f = f.exact_div(g)
            h = h % f
    if f.deg > 0:
        out.append((f, f.deg))
    return out


def _equal_degree(f: Poly, d: int, rng: random.Random) -> list[Poly]:
    if f.deg == d:
        return [f]
    F = f.field
    e = (F.q**d - 1) // 2
    while True:
        a = Poly(F, [rng.randrange(F.q) for _ in range(f.deg)])
        if a.deg < 1:
            continue
        g = poly_gcd(f, a)
        if 0 < g.deg < f.deg:
            break
        b = a.powmod(e, f) - Poly.const(F, 1)
        g = poly_gcd(f, b)
        if 0 < g.deg < f.deg:
            break
    return _equal_degree(g, d, rng) + _equal_degree(f.exact_div(g), d, rng)


def factor(f: Poly) -> tuple[int, list[tuple[Poly, int]]]:
    """(leading coefficient, sorted [(monic irreducible, multiplicity)])."""
    if not f:
        raise DomainError("cannot factor the zero polynomial")
    rng = random.Random(0x5EED)
    acc: dict[Poly, int] = {}
    for g, e in squarefree_decomposition(f):
        for h, d in _distinct_degree(g):
            for pi in _equal_degree(h, d, rng):
                pi = pi.monic()
                acc[pi] = acc.get(pi, 0) + e
    return f.lead, sorted(acc.items(), key=lambda kv: kv[0].sort_key())


# ---------------------------------------------------------------------------


class RationalFunction:
    """num/den in lowest terms with den monic; zero is 0/1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, *, _canonical: bool = False):
        F = num.field
        if den is None:
            den = Poly.const(F, 1)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not _canonical:
            if not num:
                den = Poly.const(F, 1)
            else:
                g = poly_gcd(num, den)
                if g.deg > 0:
                    num, den = num.exact_div(g), den.exact_div(g)
                if den.lead != 1:
                    inv = F.inv(den.lead)
                    num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def field(self) -> FiniteField:
        return self.num.field

    @classmethod
    def const(cls, field: FiniteField, a: int) -> "RationalFunction":
        return cls(Poly.const(field, a), _canonical=True) if a else cls.zero(field)

    @classmethod
    def zero(cls, field: FiniteField) -> "RationalFunction":
        return cls(Poly(field), Poly.const(field, 1), _canonical=True)

    @classmethod
    def one(cls, field: FiniteField) -> "RationalFunction":
        return cls(Poly.const(field, 1), Poly.const(field, 1), _canonical=True)

    @classmethod
    def t(cls, field: FiniteField) -> "RationalFunction":
        return cls(Poly.t(field), Poly.const(field, 1), _canonical=True)

    @classmethod
    def coerce(cls, field: FiniteField, x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Poly):
            return cls(x, _canonical=True)
        if isinstance(x, int):
            return cls.const(field, field.from_int(x))
        if isinstance(x, str):
            return parse_rational(field, x)
        raise TypeError(f"cannot coerce {x!r}")

    def _co(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.field != self.field:
                raise FieldMismatchError("rational functions over different fields")
            return other
        if isinstance(other, int):
            return RationalFunction.const(self.field, self.field.from_int(other))
        if isinstance(other, Poly):
            return RationalFunction(other, _canonical=True)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return self.num.deg <= 0 and self.den.deg == 0

    def is_polynomial(self) -> bool:
        return self.den.deg == 0

    def __eq__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = self._co(other)
        if o.den == self.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        if not self.num or not o.num:
            return RationalFunction.zero(self.field)
        # cross-cancel keeps the gcds small
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n = self.num.exact_div(g1) * o.num.exact_div(g2)
        d = self.den.exact_div(g2) * o.den.exact_div(g1)
        inv = self.field.inv(d.lead)
        return RationalFunction(n.scale(inv), d.scale(inv), _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        inv = self.field.inv(self.num.lead)
        return RationalFunction(self.den.scale(inv), self.num.scale(inv), _canonical=True)

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        F = self.field
        return RationalFunction(self.num**e, self.den**e, _canonical=True) if self.num else (
            RationalFunction.one(F) if e == 0 else self
        )

    def scale(self, a: int) -> "RationalFunction":
        return RationalFunction(self.num.scale(a), self.den, _canonical=True) if a else RationalFunction.zero(self.field)

    def derivative(self) -> "RationalFunction":
        n, d = self.num, self.den
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    def degree(self) -> int:
        """max(deg num, deg den); equals the height for x != 0."""
        if not self.num:
            return 0
        return max(self.num.deg, self.den.deg)

    def at_infinity(self) -> "RationalFunction":
        """x(1/s) as a rational function of s."""
        if not self.num:
            return self
        dn, dd = self.num.deg, self.den.deg
        n, d = self.num.reverse(), self.den.reverse()
        if dd > dn:
            n = n.shift(dd - dn)
        elif dn > dd:
            d = d.shift(dn - dd)
        return RationalFunction(n, d)

    def valuation(self, place: "Place") -> float | int:
        return valuation(self, place)

    def eval_in(self, big: FiniteField, alpha: int) -> int | None:
        """Value at alpha, or None at a pole."""
        d = self.den.eval_in(big, alpha)
        if not d:
            return None
        return big.div(self.num.eval_in(big, alpha), d)

    def __call__(self, a: int) -> int | None:
        return self.eval_in(self.field, a)

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self.den.is_one():
            return poly_str(self.num)
        n = poly_str(self.num)
        if sum(1 for a in self.num.c if a) > 1:
            n = f"({n})"
        return f"{n}/({poly_str(self.den)})"


# ---------------------------------------------------------------------------
# places, valuations, heights, divisors


@dataclass(frozen=True)
class Place:
    field: FiniteField
    pi: Poly | None  # None for the infinite place

    @classmethod
    def infinite(cls, field: FiniteField) -> "Place":
        return cls(field, None)

    @classmethod
    def finite(cls, pi: Poly) -> "Place":
        pi = pi.monic()
        if pi.deg < 1:
            raise DomainError("a finite place needs a non-constant polynomial")
        return cls(pi.field, pi)

    @property
    def kind(self) -> str:
        return "infinite" if self.pi is None else "finite"

    @property
    def is_infinite(self) -> bool:
        return self.pi is None

    @property
    def degree(self) -> int:
        return 1 if self.pi is None else self.pi.deg

    def sort_key(self) -> tuple:
        if self.pi is None:
            return (1, 0, ())
        return (0, self.pi.deg, self.pi.c)

    def __lt__(self, other: "Place"):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return "inf" if self.pi is None else f"({self.pi})"

    def __repr__(self):
        return f"Place{self}"

    def local_parameter(self) -> Poly:
        """The uniformizer as a polynomial in the local coordinate (s = 1/t at infinity)."""
        return Poly.t(self.field) if self.pi is None else self.pi

    def localize(self, x: RationalFunction) -> RationalFunction:
        """x written in the local coordinate of the place (t itself, or s = 1/t at inf)."""
        return x.at_infinity() if self.pi is None else x


def valuation(x: RationalFunction, v: Place) -> float | int:
    """v(x); +inf for x = 0."""
    if not x.num:
        return INFINITY
    if v.pi is None:
        return x.den.deg - x.num.deg
    return poly_valuation(x.num, v.pi) - poly_valuation(x.den, v.pi)


def height(x: RationalFunction) -> int:
    """h(x) = sum_v n_v max(0, -v(x)) = max(deg num, deg den); h(0) = 0."""
    return x.degree()


def height_by_valuations(x: RationalFunction) -> int:
    """Same as :func:`height`, summed place by place (used as a cross-check)."""
    if not x.num:
        return 0
    total = max(0, -valuation(x, Place.infinite(x.field)))
    if x.den.deg > 0:
        _, fac = factor(x.den)
        total += sum(pi.deg * e for pi, e in fac)
    return total


class Divisor:
    """Finite formal sum of places with integer coefficients."""

    def __init__(self, terms: dict[Place, int] | None = None):
        self.terms = {v: a for v, a in (terms or {}).items() if a}

    def degree(self) -> int:
        return sum(v.degree * a for v, a in self.terms.items())

    def __add__(self, other: "Divisor") -> "Divisor":
        out = dict(self.terms)
        for v, a in other.terms.items():
            out[v] = out.get(v, 0) + a
        return Divisor(out)

    def __neg__(self):
        return Divisor({v: -a for v, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.terms == other.terms

    def __getitem__(self, v: Place) -> int:
        return self.terms.get(v, 0)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{a}*{v}" for v, a in self.items())

    def to_json(self) -> list:
        return [[str(v), a] for v, a in self.items()]


def divisor_degree(I: Divisor) -> int:
    return I.degree()


def principal_divisor(x: RationalFunction) -> Divisor:
    if not x.num:
        raise DomainError("the zero function has no divisor")
    F = x.field
    terms: dict[Place, int] = {}
    for poly, sign in ((x.num, 1), (x.den, -1)):
        if poly.deg > 0:
            for pi, e in factor(poly)[1]:
                v = Place.finite(pi)
                terms[v] = terms.get(v, 0) + sign * e
    terms[Place.infinite(F)] = valuation(x, Place.infinite(F))
    return Divisor(terms)


def product_formula_check(x: RationalFunction) -> int:
    """sum_v n_v v(x) over the places where v(x) != 0; always 0."""
    if not x.num:
        raise DomainError("product formula is undefined for x = 0")
    return principal_divisor(x).degree()


def count_irreducibles(q: int, d: int) -> int:
    """(1/d) sum_{e | d} mu(e) q^{d/e}."""
    total = 0
    for e in range(1, d + 1):
        if d % e == 0:
            total += _mobius(e) * q ** (d // e)
    return total // d


def _mobius(n: int) -> int:
    from .gf import factor_int

    f = factor_int(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


@functools.lru_cache(maxsize=64)
def monic_irreducibles(field: FiniteField, d: int) -> tuple[Poly, ...]:
    q = field.q
    out = []
    for low in range(q**d):
        coeffs = []
        n = low
        for _ in range(d):
            n, r = divmod(n, q)
            coeffs.append(r)
        if d > 1 and coeffs[0] == 0:
            continue
        f = Poly(field, coeffs + [1])
        if is_irreducible(f):
            out.append(f)
    out.sort(key=lambda f: f.sort_key())
    return tuple(out)


def places_up_to_degree(field: FiniteField, D: int) -> list[Place]:
    if D < 1:
        raise DomainError("degree bound must be >= 1")
    if D > MAX_PLACE_DEGREE or field.q**D > MAX_PLACE_WORK:
        raise ResourceError(f"place enumeration to degree {D} over F_{field.q} exceeds the cap")
    out = [Place.finite(f) for d in range(1, D + 1) for f in monic_irreducibles(field, d)]
    out.append(Place.infinite(field))
    return out


# ---------------------------------------------------------------------------
# text formats


def coeff_str(F: FiniteField, a: int) -> str:
    if F.k == 1:
        return str(a)
    terms = []
    for i, c in reversed(list(enumerate(F.digits(a)))):
        if not c:
            continue
        mono = "" if i == 0 else ("u" if i == 1 else f"u^{i}")
        if mono and c == 1:
            terms.append(mono)
        elif mono:
            terms.append(f"{c}*{mono}")
        else:
            terms.append(str(c))
    return "+".join(terms) if terms else "0"


def poly_str(f: Poly, var: str = "t") -> str:
    F = f.field
    if not f.c:
        return "0"
    parts = []
    for i in range(f.deg, -1, -1):
        a = f.c[i]
        if not a:
            continue
        cs = coeff_str(F, a)
        if F.k > 1 and "+" in cs:
            cs = f"({cs})"
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(mono)
        else:
            parts.append(f"{cs}*{mono}")
    return "+".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z_]\w*)|(\S))")


class _Parser:
    def __init__(self, field: FiniteField, text: str):
        self.F = field
        self.toks = []
        for m in _TOKEN.finditer(text):
            num, name, sym = m.groups()
            if num is not None:
                self.toks.append(("num", int(num)))
            elif name is not None:
                self.toks.append(("name", name))
            elif sym is not None:
                if sym == "*" and self.toks and self.toks[-1] == ("sym", "*"):
                    self.toks[-1] = ("sym", "^")
                else:
                    self.toks.append(("sym", sym))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> RationalFunction:
        if not self.toks:
            raise IngestionError("empty expression")
        val = self.expr()
        if self.i != len(self.toks):
            raise IngestionError(f"unexpected token {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek() in (("sym", "+"), ("sym", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while True:
            tok = self.peek()
            if tok in (("sym", "*"), ("sym", "/")):
                self.take()
                rhs = self.unary()
                if tok[1] == "*":
                    val = val * rhs
                else:
                    if not rhs:
                        raise IngestionError("division by zero in expression")
                    val = val / rhs
            elif tok[0] in ("num", "name") or tok == ("sym", "("):
                val = val * self.unary()  # implicit product, e.g. 2t
            else:
                return val

    def unary(self):
        tok = self.peek()
        if tok == ("sym", "-"):
            self.take()
            return -self.unary()
        if tok == ("sym", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            kind, e = self.take()
            if kind != "num":
                raise IngestionError("exponent must be a non-negative integer")
            if not base and e == 0:
                return RationalFunction.one(self.F)
            return base**e
        return base

    def atom(self):
        kind, val = self.take()
        F = self.F
        if kind == "num":
            return RationalFunction.const(F, F.from_int(val))
        if kind == "name":
            if val in ("t", "x", "T"):
                return RationalFunction.t(F)
            if val == "u" and F.k > 1:
                return RationalFunction.const(F, F.from_digits([0, 1]))
            raise IngestionError(f"unknown symbol {val!r}")
        if val == "(":
            inner = self.expr()
            if self.take() != ("sym", ")"):
                raise IngestionError("unbalanced parentheses")
            return inner
        raise IngestionError(f"unexpected token {val!r}")


def parse_rational(field: FiniteField, text: str) -> RationalFunction:
    """Parse "t^3+2*t+1", "(t^2+1)/(t-2)" or the coefficient list "c0,c1,...,cd"."""
    text = str(text).strip()
    if "," in text and re.fullmatch(r"[\d\s,\-]+", text):
        coeffs = [field.from_int(int(c)) for c in text.split(",") if c.strip()]
        return RationalFunction(Poly(field, coeffs))
    return _Parser(field, text).parse()


def parse_poly(field: FiniteField, text: str) -> Poly:
    x = parse_rational(field, text)
    if not x.is_polynomial():
        raise IngestionError(f"{text!r} is not a polynomial")
    return x.num
