"""Weierstrass models over F_q(t) and their local/global reduction data.

Since p >= 5 every model is brought to short form y^2 = x^3 + A x + B and
Tate's algorithm reduces to reading off (ord A, ord B, ord Delta) after the
scaling (x, y) -> (pi^{-2k} x, pi^{-3k} y) that makes the model minimal.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import AuditError, DomainError, IngestionError, IsotrivialError
from .funcfield import (
    INFINITY,
    Divisor,
    Place,
    Poly,
    RationalFunction,
    factor,
    parse_rational,
    poly_xgcd,
    valuation,
)
from .gf import FiniteField, gf


@dataclass(frozen=True)
class WeierstrassModel:
    field: FiniteField
    A: RationalFunction
    B: RationalFunction
    ainvs: tuple[RationalFunction, ...] | None = None

    @classmethod
    def short(cls, field: FiniteField, A, B) -> "WeierstrassModel":
        A = RationalFunction.coerce(field, A)
        B = RationalFunction.coerce(field, B)
        model = cls(field, A, B)
        if model.disc.is_zero():
            raise DomainError("singular Weierstrass model (discriminant is zero)")
        return model

    @classmethod
    def from_ainvariants(cls, field: FiniteField, ainvs: Sequence) -> "WeierstrassModel":
        if len(ainvs) != 5:
            raise IngestionError("expected [a1, a2, a3, a4, a6]")
        a1, a2, a3, a4, a6 = (RationalFunction.coerce(field, a) for a in ainvs)
        b2 = a1 * a1 + a2 * 4
        b4 = a1 * a3 + a4 * 2
        b6 = a3 * a3 + a6 * 4
        c4 = b2 * b2 - b4 * 24
        c6 = -(b2 * b2 * b2) + b2 * b4 * 36 - b6 * 216
        F = field
        A = c4 * RationalFunction.const(F, F.inv(F.from_int(-48)))
        B = c6 * RationalFunction.const(F, F.inv(F.from_int(-864)))
        model = cls(field, A, B, (a1, a2, a3, a4, a6))
        if model.disc.is_zero():
            raise DomainError("singular Weierstrass model (discriminant is zero)")
        return model

    @functools.cached_property
    def disc(self) -> RationalFunction:
        A, B = self.A, self.B
        return (A * A * A * 4 + B * B * 27) * (-16)

    @functools.cached_property
    def j(self) -> RationalFunction:
        A = self.A
        return (A * 4) ** 3 * (-1728) / self.disc

    def _shift(self) -> tuple[RationalFunction, RationalFunction, RationalFunction]:
        F = self.field
        a1, a2, a3 = self.ainvs[0], self.ainvs[1], self.ainvs[2]
        b2 = a1 * a1 + a2 * 4
        half = RationalFunction.const(F, F.inv(F.from_int(2)))
        return b2 * RationalFunction.const(F, F.inv(F.from_int(12))), a1 * half, a3 * half

    def to_short(self, x: RationalFunction, y: RationalFunction) -> tuple[RationalFunction, RationalFunction]:
        """Coordinates on the user's model -> coordinates on y^2 = x^3 + A x + B."""
        if self.ainvs is None:
            return x, y
        s, h1, h3 = self._shift()
        return x + s, y + h1 * x + h3

    def from_short(self, X: RationalFunction, Y: RationalFunction) -> tuple[RationalFunction, RationalFunction]:
        if self.ainvs is None:
            return X, Y
        s, h1, h3 = self._shift()
        x = X - s
        return x, Y - h1 * x - h3

    def u_twist(self, u: RationalFunction) -> "WeierstrassModel":
        """Isomorphic model via (x, y) -> (u^2 x, u^3 y)."""
        return WeierstrassModel(self.field, self.A * u**4, self.B * u**6)

    def to_json(self) -> dict:
        out = {"q": self.field.q, "A": str(self.A), "B": str(self.B)}
        if self.ainvs is not None:
            out["a"] = [str(a) for a in self.ainvs]
        return out

    def __str__(self):
        return f"y^2 = x^3 + ({self.A})*x + ({self.B}) over F_{self.field.q}(t)"


def parse_curve(data: dict | str) -> tuple[WeierstrassModel, str]:
    """Curve JSON: {"q": 5, "a": [a1,a2,a3,a4,a6]} or {"q": 5, "A": .., "B": ..}."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"invalid curve JSON: {exc}") from None
    if not isinstance(data, dict) or "q" not in data:
        raise IngestionError("curve spec needs a field size 'q'")
    try:
        F = gf(int(data["q"]))
        if "a" in data:
            model = WeierstrassModel.from_ainvariants(F, data["a"])
        elif "A" in data and "B" in data:
            model = WeierstrassModel.short(F, data["A"], data["B"])
        else:
            raise IngestionError("curve spec needs 'a' or both 'A' and 'B'")
    except (DomainError, ZeroDivisionError, ValueError) as exc:
        if isinstance(exc, IngestionError):
            raise
        raise IngestionError(str(exc)) from None
    label = str(data.get("label", model))
    return model, label


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionData:
    place: Place
    kodaira: str
    ord_delta: int
    f_v: int
    mult_kind: str  # split | nonsplit | none
    scale: int  # k with (x, y) -> (pi^{-2k} x, pi^{-3k} y) minimal at the place
    ord_A: float | int  # in the minimal model
    ord_B: float | int

    @property
    def reduction(self) -> str:
        if self.f_v == 0:
            return "good"
        if self.f_v == 1:
            return f"{self.mult_kind}-mult"
        return "additive"

    def to_json(self) -> dict:
        return {
            "place": str(self.place),
            "degree": self.place.degree,
            "kodaira": self.kodaira,
            "ord_delta": self.ord_delta,
            "f_v": self.f_v,
            "mult_kind": self.mult_kind,
        }


def _floor_div(a, b):
    return INFINITY if a == INFINITY else a // b


def residue(x: RationalFunction, pi: Poly) -> Poly:
    """Image of a pi-integral x in F_q[t]/(pi), as a reduced polynomial."""
    n = x.num % pi
    d = x.den % pi
    if not d:
        raise DomainError("residue of a non-integral function")
    g, s, _ = poly_xgcd(d, pi)
    return (n * s) % pi


def residue_is_square(c: Poly, pi: Poly) -> bool:
    F = pi.field
    e = (F.q**pi.deg - 1) // 2
    return c.powmod(e, pi) == Poly.const(F, 1)


_ADDITIVE_TYPES = {2: "II", 3: "III", 4: "IV", 6: "I0*", 8: "IV*", 9: "III*", 10: "II*"}


def tate_local(model: WeierstrassModel, v: Place) -> ReductionData:
    A, B, D = model.A, model.B, model.disc
    if D.is_zero():
        raise DomainError("singular model")
    oA, oB, oD = valuation(A, v), valuation(B, v), valuation(D, v)
    k = min(_floor_div(oA, 4), _floor_div(oB, 6))
    a = oA - 4 * k
    b = oB - 6 * k
    delta = int(oD - 12 * k)
    if delta < 0:
        raise AuditError(f"negative minimal discriminant order at {v}")
    if delta == 0:
        return ReductionData(v, "I0", 0, 0, "none", int(k), a, b)
    if a == 0:
        # node at x0 = -3B/(2A); split iff the tangent slopes sqrt(3 x0) are rational
        pi = v.local_parameter()
        s = RationalFunction(pi)
        Amin = v.localize(A) / s ** (4 * k)
        Bmin = v.localize(B) / s ** (6 * k)
        c = (Bmin * (-9)) / (Amin * 2)
        kind = "split" if residue_is_square(residue(c, pi), pi) else "nonsplit"
        return ReductionData(v, f"I{delta}", delta, 1, kind, int(k), a, b)
    if a == 2 and b == 3 and delta > 6:
        kod = f"I{delta - 6}*"
    elif delta in _ADDITIVE_TYPES:
        kod = _ADDITIVE_TYPES[delta]
    else:
        raise AuditError(f"unexpected additive reduction data {(a, b, delta)} at {v}")
    return ReductionData(v, kod, delta, 2, "none", int(k), a, b)


def minimal_local_coefficients(model: WeierstrassModel, red: ReductionData) -> tuple[RationalFunction, RationalFunction]:
    """(A', B') of the minimal model at the place, in the local coordinate."""
    v = red.place
    s = RationalFunction(v.local_parameter())
    k = red.scale
    return v.localize(model.A) / s ** (4 * k), v.localize(model.B) / s ** (6 * k)


@dataclass
class CurveInvariants:
    delta_divisor: Divisor
    deg_delta: int
    hE: Fraction
    conductor_divisor: Divisor
    nE: int
    s: int | None
    isotrivial: bool
    local: dict[Place, ReductionData] = field(default_factory=dict)

    @property
    def bad(self) -> list[ReductionData]:
        return [r for _, r in sorted(self.local.items(), key=lambda kv: kv[0].sort_key()) if r.f_v > 0]

    def to_json(self) -> dict:
        return {
            "deg_delta": self.deg_delta,
            "hE": str(self.hE),
            "nE": self.nE,
            "s": self.s,
            "isotrivial": self.isotrivial,
            "bad_places": [r.to_json() for r in self.bad],
        }


def candidate_places(model: WeierstrassModel) -> list[Place]:
    polys = [model.A.den, model.B.den, model.disc.num]
    found: set[Poly] = set()
    for f in polys:
        if f.deg > 0:
            for pi, _ in factor(f)[1]:
                found.add(pi)
    places = [Place.finite(pi) for pi in found]
    places.sort(key=Place.sort_key)
    places.append(Place.infinite(model.field))
    return places


def global_invariants(model: WeierstrassModel) -> CurveInvariants:
    local = {v: tate_local(model, v) for v in candidate_places(model)}
    delta = Divisor({v: r.ord_delta for v, r in local.items()})
    cond = Divisor({v: r.f_v for v, r in local.items()})
    deg_delta = delta.degree()
    isotrivial = not trace_zero_screen(model)
    s = None if isotrivial else inseparability_degree(model.j)
    return CurveInvariants(
        delta_divisor=delta,
        deg_delta=deg_delta,
        hE=Fraction(deg_delta, 12),
        conductor_divisor=cond,
        nE=cond.degree(),
        s=s,
        isotrivial=isotrivial,
        local=local,
    )


def inseparability_degree(j: RationalFunction) -> int:
    """Largest s with j in F_q(t^{p^s})."""
    if j.is_constant():
        raise IsotrivialError("constant j-invariant")
    p = j.field.p
    s = 0
    num, den = j.num, j.den
    while not num.derivative() and not den.derivative():
        num = Poly(num.field, num.c[::p])
        den = Poly(den.field, den.c[::p])
        s += 1
    return s


def separable_degree(j: RationalFunction) -> int:
    s = inseparability_degree(j)
    return j.degree() // j.field.p**s


def trace_zero_screen(model: WeierstrassModel) -> bool:
    """True iff j is non-constant (non-isotrivial, hence trace zero over F_q(t))."""
    return not model.j.is_constant()


class EllipticCurve:
    """A model together with lazily computed global invariants."""

    def __init__(self, model: WeierstrassModel, label: str | None = None):
        self.model = model
        self.field = model.field
        self.label = label or str(model)

    @classmethod
    def from_json(cls, data) -> "EllipticCurve":
        model, label = parse_curve(data)
        return cls(model, label)

    @classmethod
    def short(cls, q: int, A, B, label: str | None = None) -> "EllipticCurve":
        return cls(WeierstrassModel.short(gf(q), A, B), label)

    @property
    def A(self) -> RationalFunction:
        return self.model.A

    @property
    def B(self) -> RationalFunction:
        return self.model.B

    @functools.cached_property
    def invariants(self) -> CurveInvariants:
        return global_invariants(self.model)

    def require_trace_zero(self) -> None:
        if not trace_zero_screen(self.model):
            raise IsotrivialError(f"{self.label}: constant j-invariant, trace-zero screen fails")

    def __repr__(self):
        return f"EllipticCurve({self.label!r})"
