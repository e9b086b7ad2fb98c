"""Finite fields F_q, q = p^k with p >= 5, in a polynomial basis.

Elements are handled internally as integers: the coefficient vector
(c_0, ..., c_{k-1}) of c_0 + c_1 u + ... + c_{k-1} u^{k-1} is encoded as
sum c_i p^i.  :class:`FieldElement` wraps that integer for the public API;
the hot loops (point counting, polynomial arithmetic) work on the raw ints.

Fields with q <= TABLE_LIMIT get exp/log/Zech tables on first use; they are
an accelerator only and the table-free code path gives identical results.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, FieldMismatchError, ResourceError

MAX_ABSOLUTE_DEGREE = 24
TABLE_LIMIT = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in (2, 3, 5, 7, 11, 13):
        if n % d == 0:
            return n == d
    d = 17
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factor_int(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p^k, or raise DomainError."""
    if q < 2:
        raise DomainError(f"{q} is not a prime power")
    f = factor_int(q)
    if len(f) != 1:
        raise DomainError(f"{q} is not a prime power")
    ((p, k),) = f.items()
    return p, k


# ---------------------------------------------------------------------------
# dense polynomials over F_p on plain lists (little-endian); used for moduli

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        if c:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - c * mi) % p
        a.pop()
        _trim(a)
    return _trim(a)


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _trim([c % p for c in out])


def _pmulmod(a, b, m, p):
    return _pmod(_pmul(a, b, p), m, p)


def _ppowmod(a, e: int, m, p) -> list[int]:
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        e >>= 1
        if e:
            base = _pmulmod(base, base, m, p)
    return result


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def is_irreducible_mod_p(f: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic f over F_p."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    # frob[i] = x^(p^i) mod f
    frob = [x]
    for _ in range(n):
        frob.append(_ppowmod(frob[-1], p, f, p))
    if _psub(frob[n], x, p):
        return False
    for r in factor_int(n):
        g = _pgcd(f, _psub(frob[n // r], x, p), p)
        if len(g) > 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def lex_first_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Monic irreducible of degree n over F_p with the smallest encoding of
    its non-leading coefficients (sum c_i p^i)."""
    if n == 1:
        return (0, 1)
    for low in range(p**n):
        coeffs = [(low // p**i) % p for i in range(n)] + [1]
        if coeffs[0] == 0:
            continue
        if is_irreducible_mod_p(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------


class FiniteField:
    """F_q = F_p[u]/(modulus).  Plays the role of the field specification."""

    def __init__(self, p: int, modulus: Sequence[int]):
        if not is_prime(p) or p < 5:
            raise DomainError(f"characteristic must be a prime >= 5, got {p}")
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) < 2 or modulus[-1] != 1:
            raise DomainError("modulus must be monic of degree >= 1")
        self.p = p
        self.k = len(modulus) - 1
        self.modulus = modulus
        self.q = p**self.k
        self._pow = [p**i for i in range(self.k)]

    # identity -------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k}, modulus={list(self.modulus)})"

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteField":
        return field_from_modulus(int(data["p"]), tuple(data["modulus"]))

    # encoding -------------------------------------------------------------
    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, coeffs: Sequence[int]) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.k:
            coeffs = _pmod(coeffs, self.modulus, self.p)
        return sum((int(c) % self.p) * self._pow[i] for i, c in enumerate(coeffs))

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatchError("element belongs to a different field")
            return value
        if isinstance(value, (list, tuple)):
            return FieldElement(self, self.from_digits(value))
        return FieldElement(self, self.from_int(int(value)))

    def from_int(self, n: int) -> int:
        """Image of the rational integer n (a constant)."""
        return n % self.p

    def gen(self) -> "FieldElement":
        return FieldElement(self, self.from_digits([0, 1]) if self.k > 1 else 0)

    def elements(self):
        return (FieldElement(self, a) for a in range(self.q))

    # tables ----------------------------------------------------------------
    @property
    def has_tables(self) -> bool:
        return self.q <= TABLE_LIMIT

    @functools.cached_property
    def _tables(self):
        if not self.has_tables:
            raise ResourceError(f"field of size {self.q} exceeds table limit")
        q, p, k = self.q, self.p, self.k
        g = self._find_primitive()
        # powers of g as digit rows, built by block doubling
        exp_digits = np.zeros((q - 1, k), dtype=np.int64)
        exp_digits[0, 0] = 1
        filled = 1
        while filled < q - 1:
            m = self._mul_matrix(self._pow_slow(g, filled))
            take = min(filled, q - 1 - filled)
            exp_digits[filled : filled + take] = (exp_digits[:take] @ m) % p
            filled += take
        weights = np.array(self._pow, dtype=np.int64)
        exp = exp_digits @ weights
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1, dtype=np.int64)
        one_plus = self.vec_add(exp, np.ones_like(exp))
        zech = np.where(one_plus == 0, -1, log[one_plus])
        chi = np.zeros(q, dtype=np.int8)
        chi[exp] = np.where(np.arange(q - 1) % 2 == 0, 1, -1)
        return {
            "g": g,
            "exp": exp,
            "log": log,
            "zech": zech,
            "chi": chi,
            "exp_list": exp.tolist(),
            "log_list": log.tolist(),
            "zech_list": zech.tolist(),
        }

    def _mul_matrix(self, c: int) -> np.ndarray:
        rows = []
        basis = 1
        for _ in range(self.k):
            rows.append(self.digits(self._mul_slow(basis, c)))
            basis = self._mul_slow(basis, self.from_digits([0, 1]) if self.k > 1 else 1)
        return np.array(rows, dtype=np.int64)

    def _find_primitive(self) -> int:
        if self.q == 2:  # pragma: no cover
            return 1
        order = self.q - 1
        primes = list(factor_int(order))
        for cand in range(2, self.q):
            if all(self._pow_slow(cand, order // r) != 1 for r in primes):
                return cand
        raise AssertionError("no primitive element")  # pragma: no cover

    # table-free arithmetic --------------------------------------------------
    def _add_slow(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        out, w = 0, 1
        p = self.p
        for _ in range(self.k):
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * w
            w *= p
        return out

    def _mul_slow(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        prod = _pmul(self.digits(a), self.digits(b), self.p)
        return self.from_digits(_pmod(prod, self.modulus, self.p))

    def _pow_slow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_slow(result, base)
            e >>= 1
            if e:
                base = self._mul_slow(base, base)
        return result

    # scalar arithmetic on raw ints ---------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if not a:
            return b
        if not b:
            return a
        if self.has_tables:
            t = self._tables
            la, lb = t["log_list"][a], t["log_list"][b]
            z = t["zech_list"][(lb - la) % (self.q - 1)]
            if z < 0:
                return 0
            return t["exp_list"][(la + z) % (self.q - 1)]
        return self._add_slow(a, b)

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        out, w, p = 0, 1, self.p
        for _ in range(self.k):
            a, r = divmod(a, p)
            out += (-r % p) * w
            w *= p
        return out

    def sub(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if not a or not b:
            return 0
        if self.has_tables:
            t = self._tables
            return t["exp_list"][(t["log_list"][a] + t["log_list"][b]) % (self.q - 1)]
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if not a:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        if self.has_tables:
            t = self._tables
            return t["exp_list"][(-t["log_list"][a]) % (self.q - 1)]
        return self._pow_slow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if e == 0:
            return 1
        if not a:
            return 0
        if self.k == 1:
            return pow(a, e, self.p)
        if self.has_tables:
            t = self._tables
            return t["exp_list"][(t["log_list"][a] * e) % (self.q - 1)]
        return self._pow_slow(a, e)

    def chi(self, a: int) -> int:
        """Quadratic character: 0, 1 or -1."""
        if not a:
            return 0
        if self.has_tables:
            return int(self._tables["chi"][a])
        return 1 if self.pow(a, (self.q - 1) // 2) == 1 else -1

    def is_square(self, a: int) -> bool:
        return self.chi(a) >= 0

    def sqrt(self, a: int) -> int | None:
        """A square root of a (smaller encoding of the pair), or None."""
        if not a:
            return 0
        if self.chi(a) < 0:
            return None
        if self.has_tables:
            t = self._tables
            r = t["exp_list"][t["log_list"][a] // 2]
        else:
            r = self._tonelli_shanks(a)
        return min(r, self.neg(r))

    def _tonelli_shanks(self, a: int) -> int:
        q = self.q
        s, odd = 0, q - 1
        while odd % 2 == 0:
            s, odd = s + 1, odd // 2
        rng = random.Random(q)
        z = 2
        while self.chi(z) != -1:
            z = rng.randrange(2, q)
        m, c, t, r = s, self.pow(z, odd), self.pow(a, odd), self.pow(a, (odd + 1) // 2)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2, i = self.mul(t2, t2), i + 1
            b = self.pow(c, 1 << (m - i - 1))
            m, c = i, self.mul(b, b)
            t, r = self.mul(t, c), self.mul(r, b)
        return r

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.p**times)

    # vectorised arithmetic on int64 arrays -----------------------------------
    def vec_add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p = self.p
        if self.k == 1:
            return (a + b) % p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._pow:
            out += ((a // w + b // w) % p) * w
        return out

    def vec_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (a * b) % self.p
        t = self._tables
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        zero = (a == 0) | (b == 0)
        la = t["log"][a]
        lb = t["log"][b]
        out = t["exp"][(la + lb) % (self.q - 1)]
        return np.where(zero, 0, out)

    def vec_chi(self, a: np.ndarray) -> np.ndarray:
        return self._tables["chi"][a].astype(np.int64)

    @property
    def generator(self) -> int:
        """A primitive element (raw int)."""
        return self._tables["g"]

    def log(self, a: int) -> int:
        return self._tables["log_list"][a]

    def exp(self, n: int) -> int:
        return self._tables["exp_list"][n % (self.q - 1)]


@functools.lru_cache(maxsize=None)
def field_from_modulus(p: int, modulus: tuple[int, ...]) -> FiniteField:
    return FiniteField(p, modulus)


@functools.lru_cache(maxsize=None)
def prime_field(p: int) -> FiniteField:
    return field_from_modulus(p, (0, 1))


def gf(q: int) -> FiniteField:
    """F_q with the lexicographically first monic irreducible modulus."""
    p, k = prime_power(q)
    if k > MAX_ABSOLUTE_DEGREE:
        raise ResourceError(f"extension degree {k} exceeds cap {MAX_ABSOLUTE_DEGREE}")
    return field_from_modulus(p, lex_first_irreducible(p, k))


def extension_field(spec: FiniteField, m: int, cap: int = MAX_ABSOLUTE_DEGREE) -> FiniteField:
    """F_{q^m} as an F_p-extension of degree k*m (lexicographic-first modulus)."""
    if m < 1:
        raise DomainError("extension degree must be >= 1")
    if m == 1:
        return spec
    n = spec.k * m
    if n > cap:
        raise ResourceError(f"absolute degree {n} exceeds cap {cap}")
    return field_from_modulus(spec.p, lex_first_irreducible(spec.p, n))


class Embedding:
    """The field map small -> big sending u to a fixed root of small.modulus."""

    def __init__(self, small: FiniteField, big: FiniteField):
        if small.p != big.p or big.k % small.k:
            raise DomainError(f"{small} does not embed in {big}")
        self.small, self.big = small, big
        if small.k == 1:
            image = list(range(small.p))
        else:
            beta = self._root(small, big)
            powers = [1]
            for _ in range(small.k - 1):
                powers.append(big.mul(powers[-1], beta))
            image = []
            for a in range(small.q):
                acc = 0
                for c, pw in zip(small.digits(a), powers):
                    if c:
                        acc = big.add(acc, big.mul(big.from_int(c), pw))
                image.append(acc)
        self.image = image
        self.preimage = {b: a for a, b in enumerate(image)}

    @staticmethod
    def _root(small: FiniteField, big: FiniteField) -> int:
        if small == big:
            return small.from_digits([0, 1])
        step = (big.q - 1) // (small.q - 1)
        cands = sorted(big.exp(step * j) for j in range(small.q - 1))
        for b in cands:
            acc = 0
            for c in reversed(small.modulus):
                acc = big.add(big.mul(acc, b), big.from_int(c))
            if acc == 0:
                return b
        raise AssertionError("modulus has no root in the extension")  # pragma: no cover

    def __call__(self, a: int) -> int:
        return self.image[a]

    def back(self, b: int) -> int:
        try:
            return self.preimage[b]
        except KeyError:
            raise DomainError("element does not lie in the subfield") from None


@functools.lru_cache(maxsize=None)
def embedding(small: FiniteField, big: FiniteField) -> Embedding:
    return Embedding(small, big)


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    value: int

    @property
    def coeffs(self) -> list[int]:
        return self.field.digits(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine elements of {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(b, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.div(self.value, b))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        if self.field.k == 1:
            return f"{self.value}"
        return f"{self.coeffs}"

    def to_json(self) -> list[int]:
        return self.coeffs


def inv(a: FieldElement) -> FieldElement:
    if not a:
        raise DomainError("inversion of zero")
    return a.inverse()


def sqrt_or_none(a: FieldElement) -> FieldElement | None:
    r = a.field.sqrt(a.value)
    return None if r is None else FieldElement(a.field, r)
