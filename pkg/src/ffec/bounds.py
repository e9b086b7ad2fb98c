"""Explicit inequalities: regulator lower bound, height gap, conductor rank
bounds, and the number-field regulator inequalities.

Every "log" is the natural logarithm.  Final comparisons go through mpmath
interval arithmetic, so a reported ``holds`` is a rigorous statement about the
inputs (which for regulators and heights are themselves certified intervals).
"""

from __future__ import annotations

import contextlib
import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import mpmath
from mpmath import iv, mp

from .errors import DomainError, IngestionError

DIGITS = 50


@contextlib.contextmanager
def _precision(dps: int = DIGITS):
    old_mp, old_iv = mp.dps, iv.dps
    mp.dps, iv.dps = dps, dps
    try:
        yield
    finally:
        mp.dps, iv.dps = old_mp, old_iv


def _ivq(x) -> "iv.mpf":
    """Tight interval around an exact rational (or decimal string)."""
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    if isinstance(x, float):
        return iv.mpf(repr(x))
    return iv.mpf(x)


def _lo(x) -> mpmath.mpf:
    return mp.mpf(x.a)


def _hi(x) -> mpmath.mpf:
    return mp.mpf(x.b)


# ---------------------------------------------------------------------------
# constants


def _c0(M, q, g, p, s):
    q = M.mpf(q)
    return 1 / (M.mpf(p) ** (2 * s) * 12 * M.sqrt(q) * M.log(q) ** 2 * (5 * g + 9) * M.mpf(10) ** (M.mpf(31) / 2 + 23 * g))


def c0(q: int, g: int = 0, p: int | None = None, s: int = 0) -> mpmath.mpf:
    """(p^{2s} 12 sqrt(q) (log q)^2 (5g+9) 10^{15.5+23g})^{-1}."""
    p = p if p is not None else _char(q)
    _check_params(q, g, p, s)
    with _precision():
        return +_c0(mp, q, g, p, s)


def c0_interval(q: int, g: int = 0, p: int | None = None, s: int = 0):
    p = p if p is not None else _char(q)
    _check_params(q, g, p, s)
    with _precision():
        return _c0(iv, q, g, p, s)


def _char(q: int) -> int:
    from .gf import prime_power

    return prime_power(q)[0]


def _check_params(q, g, p, s):
    if p < 5 or q % p:
        raise DomainError("need q a power of a prime p >= 5")
    if g < 0 or s < 0:
        raise DomainError("g and s must be >= 0")


def height_gap_bound(hE, p: int, s: int = 0, g: int = 0, M=mp):
    """p^{-2s} 10^{-15.5-23g} h(E)."""
    hE = _ivq(Fraction(hE)) if M is iv else M.mpf(Fraction(hE).numerator) / Fraction(hE).denominator
    return M.mpf(p) ** (-2 * s) * M.mpf(10) ** (-M.mpf(31) / 2 - 23 * g) * hE


# ---------------------------------------------------------------------------
# conductor rank bounds


def _long(M, nE, q, g):
    n, q = M.mpf(nE), M.mpf(q)
    ln, lq, sq = M.log(n), M.log(q), M.sqrt(q)
    return n / (2 * ln) * lq + n / ln**2 * 4 * sq * lq**2 + M.mpf(7) / 2 + lq / (sq * ln) * ((2 * g - 2) * sq + 20 * g + 17)


def _weakeasy(M, nE, q, g):
    n, q = M.mpf(nE), M.mpf(q)
    return n / M.log(n) * M.sqrt(q) * M.log(q) ** 2 * (5 * g + 9)


def _rank_args(nE, q, g):
    if nE <= 1:
        raise DomainError("the conductor bounds need nE > 1")
    if q < 5 or g < 0:
        raise DomainError("need q >= 5 and g >= 0")


def brumer_bound_long(nE: int, q: int, g: int = 0) -> mpmath.mpf:
    """nE/(2 log nE) log q + nE/(log nE)^2 4 sqrt(q)(log q)^2 + 7/2
    + log q/(sqrt(q) log nE) ((2g-2) sqrt(q) + 20g + 17)."""
    _rank_args(nE, q, g)
    with _precision():
        return +_long(mp, nE, q, g)


def brumer_bound_weakeasy(nE: int, q: int, g: int = 0) -> mpmath.mpf:
    """nE/log nE * sqrt(q) (log q)^2 (5g+9)."""
    _rank_args(nE, q, g)
    with _precision():
        return +_weakeasy(mp, nE, q, g)


def long_interval(nE, q, g=0):
    _rank_args(nE, q, g)
    with _precision():
        return _long(iv, nE, q, g)


def weakeasy_interval(nE, q, g=0):
    _rank_args(nE, q, g)
    with _precision():
        return _weakeasy(iv, nE, q, g)


def scan_long_vs_weakeasy(qs=(5, 7, 11, 25), gs=(0, 1, 2), n_max: int = 10_000) -> list[tuple[int, int, int]]:
    """(q, g, nE) on the grid nE in [3, n_max] where weakeasy >= long is not
    certified.  A float screen handles clear cases; anything within a relative
    1e-9 of failing is redone in interval arithmetic."""
    import numpy as np

    bad = []
    n = np.arange(3, n_max + 1, dtype=np.float64)
    ln = np.log(n)
    for q in qs:
        lq, sq = math.log(q), math.sqrt(q)
        for g in gs:
            lg = n / (2 * ln) * lq + n / ln**2 * 4 * sq * lq**2 + 3.5 + lq / (sq * ln) * ((2 * g - 2) * sq + 20 * g + 17)
            we = n / ln * sq * lq**2 * (5 * g + 9)
            close = np.nonzero(we - lg <= 1e-9 * we)[0]
            with _precision(30):
                for i in close.tolist():
                    m = int(n[i])
                    if _lo(_weakeasy(iv, m, q, g)) < _hi(_long(iv, m, q, g)):
                        bad.append((q, g, m))
    return bad


# ---------------------------------------------------------------------------
# curve-level checks


@dataclass
class BoundContext:
    q: int
    p: int
    s: int
    nE: int
    hE: Fraction
    r: int
    r_an: int | None
    reg_lo: Fraction
    reg_hi: Fraction
    g: int = 0

    def __post_init__(self):
        _check_params(self.q, self.g, self.p, self.s)
        self.hE = Fraction(self.hE)
        if self.hE < 0:
            raise DomainError("h(E) must be >= 0")


@dataclass(frozen=True)
class RegulatorBoundReport:
    lhs: mpmath.mpf
    rhs: mpmath.mpf
    holds: bool
    branch: str  # rank0 | vacuous | generic
    log10_margin: float | None
    c0: mpmath.mpf

    def to_json(self) -> dict:
        return {
            "lhs": mpmath.nstr(self.lhs, 12),
            "rhs": mpmath.nstr(self.rhs, 12),
            "holds": self.holds,
            "branch": self.branch,
            "log10_margin": self.log10_margin,
            "c0": mpmath.nstr(self.c0, 20),
        }


def check_regulator_bound(ctx: BoundContext) -> RegulatorBoundReport:
    """Reg >= (c0 log(12 h(E)))^r, with the lower end of the regulator interval."""
    with _precision():
        c = c0_interval(ctx.q, ctx.g, ctx.p, ctx.s)
        lhs = _ivq(ctx.reg_lo)
        if ctx.r == 0:
            return RegulatorBoundReport(mp.mpf(1), mp.mpf(1), ctx.reg_lo <= 1 <= ctx.reg_hi, "rank0", 0.0, _lo(c))
        L = iv.log(_ivq(12 * ctx.hE))
        if _hi(L) <= 0:
            return RegulatorBoundReport(_lo(lhs), mp.mpf(0), ctx.reg_lo > 0, "vacuous", None, _lo(c))
        rhs = (c * L) ** ctx.r
        holds = bool(_lo(lhs) >= _hi(rhs))
        margin = float(mp.log10(_lo(lhs)) - mp.log10(_hi(rhs))) if _lo(lhs) > 0 else None
        return RegulatorBoundReport(_lo(lhs), _hi(rhs), holds, "generic", margin, _lo(c))


@dataclass(frozen=True)
class HeightGapReport:
    hhat_lower: Fraction
    bound: mpmath.mpf
    holds: bool

    def to_json(self) -> dict:
        return {"hhat_lower": float(self.hhat_lower), "bound": mpmath.nstr(self.bound, 12), "holds": self.holds}


def check_height_gap(hhat_lower: Fraction, ctx: BoundContext, torsion: bool = False) -> HeightGapReport:
    """hhat(P) >= p^{-2s} 10^{-15.5-23g} h(E) for a non-torsion P."""
    if torsion:
        raise DomainError("the height gap applies to non-torsion points only")
    with _precision():
        b = height_gap_bound(ctx.hE, ctx.p, ctx.s, ctx.g, M=iv)
        holds = bool(_lo(_ivq(Fraction(hhat_lower))) >= _hi(b))
        return HeightGapReport(Fraction(hhat_lower), _hi(b), holds)


def check_point_height_gap(P, ctx: BoundContext, tol=Fraction(1, 10**8), method: str = "exact") -> HeightGapReport:
    from .points import canonical_height, is_torsion

    if is_torsion(P):
        raise DomainError("the height gap applies to non-torsion points only")
    h = canonical_height(P, tol, method)
    return check_height_gap(h.lower, ctx)


@dataclass(frozen=True)
class RankBoundReport:
    branch: str  # large-conductor | small-conductor
    r_an: int
    bounds: dict
    holds: bool

    def to_json(self) -> dict:
        return {"branch": self.branch, "r_an": self.r_an, "bounds": self.bounds, "holds": self.holds}


def rank_bound(ctx: BoundContext, r_an: int | None = None) -> RankBoundReport:
    """r_an against the conductor bounds, split at nE = e as in the main proof."""
    r_an = ctx.r_an if r_an is None else r_an
    if r_an is None:
        raise DomainError("rank_bound needs an analytic rank")
    nE, q, g = ctx.nE, ctx.q, ctx.g
    bounds: dict = {}
    with _precision():
        if nE > math.e:
            lg = long_interval(nE, q, g)
            we = weakeasy_interval(nE, q, g)
            x = _ivq(12 * ctx.hE)
            hform = x / iv.log(x) * iv.sqrt(q) * iv.log(q) ** 2 * (5 * g + 9)
            bounds["long"] = float(_hi(lg))
            bounds["weakeasy"] = float(_hi(we))
            bounds["height_form"] = float(_hi(hform))
            bounds["nE_le_12hE"] = bool(nE <= 12 * ctx.hE)
            # x/log x is increasing past e, so nE <= 12hE carries over to the bound
            mono = bool(_hi(iv.mpf(nE) / iv.log(nE)) <= _lo(x / iv.log(x))) if bounds["nE_le_12hE"] else False
            bounds["monotone_step"] = mono
            holds = (
                r_an <= _lo(lg)
                and _hi(lg) <= _lo(we)
                and r_an <= _lo(we)
                and r_an <= _lo(hform)
                and bounds["nE_le_12hE"]
                and mono
            )
            return RankBoundReport("large-conductor", r_an, bounds, bool(holds))
        easy = nE + 4 * g - 4
        bounds["easy"] = easy
        return RankBoundReport("small-conductor", r_an, bounds, r_an <= easy)


# ---------------------------------------------------------------------------
# number fields


@dataclass(frozen=True)
class NumberFieldRecord:
    label: str
    d: int
    r1: int
    r2: int
    R: str  # decimal string, kept verbatim for exact interval conversion
    w: int

    def __post_init__(self):
        if self.d < 1 or self.r1 < 0 or self.r2 < 0:
            raise IngestionError(f"{self.label}: negative or zero signature")
        if self.d != self.r1 + 2 * self.r2:
            raise IngestionError(f"{self.label}: d != r1 + 2 r2")
        if self.w < 2 or self.w % 2:
            raise IngestionError(f"{self.label}: w must be even and >= 2")
        try:
            val = Fraction(self.R)
        except (ValueError, ZeroDivisionError):
            raise IngestionError(f"{self.label}: bad regulator {self.R!r}") from None
        if val <= 0:
            raise IngestionError(f"{self.label}: regulator must be positive")

    @property
    def rank(self) -> int:
        return self.r1 + self.r2 - 1


def parse_number_field_row(row: dict) -> NumberFieldRecord:
    try:
        return NumberFieldRecord(
            label=row["label"].strip(),
            d=int(row["d"]),
            r1=int(row["r1"]),
            r2=int(row["r2"]),
            R=row["regulator"].strip(),
            w=int(row["w"]),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, IngestionError):
            raise
        raise IngestionError(f"malformed number-field row {row!r}: {exc}") from None


def read_number_fields(source: str | Path | Iterable[str]) -> tuple[list[NumberFieldRecord], list[tuple[int, str]]]:
    """Parse the CSV (lines starting with '#' are comments).  Returns the good
    records and (line number, message) for each rejected row."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text().splitlines()
    else:
        lines = list(source)
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not numbered:
        return [], []
    header = next(csv.reader([numbered[0][1]]))
    if [h.strip() for h in header] != ["label", "d", "r1", "r2", "regulator", "w"]:
        raise IngestionError(f"unexpected header {header}")
    good, bad = [], []
    for lineno, ln in numbered[1:]:
        values = next(csv.reader([ln]))
        if len(values) != 6:
            bad.append((lineno, f"expected 6 fields, got {len(values)}"))
            continue
        try:
            good.append(parse_number_field_row(dict(zip(["label", "d", "r1", "r2", "regulator", "w"], values))))
        except IngestionError as exc:
            bad.append((lineno, str(exc)))
    return good, bad


@dataclass(frozen=True)
class FriedmanReport:
    label: str
    lhs1: mpmath.mpf
    rhs1: mpmath.mpf
    holds1: bool
    lhs2: mpmath.mpf
    rhs2: mpmath.mpf
    holds2: bool
    rank: int
    dirichlet_ok: bool

    @property
    def margin1(self) -> float:
        return float(self.lhs1 / self.rhs1)

    @property
    def margin2(self) -> float:
        return float(self.lhs2 / self.rhs2)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "ineq1": {"lhs": float(self.lhs1), "rhs": float(self.rhs1), "holds": self.holds1, "margin": self.margin1},
            "ineq2": {"lhs": float(self.lhs2), "rhs": float(self.rhs2), "holds": self.holds2, "margin": self.margin2},
            "rank": self.rank,
            "dirichlet_ok": self.dirichlet_ok,
        }


def check_friedman(rec: NumberFieldRecord) -> FriedmanReport:
    """R/w >= 0.0031 exp(0.241 d + 0.497 r1) and R >= 0.0062 exp(0.241 r_F)."""
    with _precision():
        R = iv.mpf(rec.R)
        lhs1 = R / rec.w
        rhs1 = iv.mpf("0.0031") * iv.exp(iv.mpf("0.241") * rec.d + iv.mpf("0.497") * rec.r1)
        rhs2 = iv.mpf("0.0062") * iv.exp(iv.mpf("0.241") * rec.rank)
        return FriedmanReport(
            rec.label,
            _lo(lhs1),
            _hi(rhs1),
            bool(_lo(lhs1) >= _hi(rhs1)),
            _lo(R),
            _hi(rhs2),
            bool(_lo(R) >= _hi(rhs2)),
            rec.rank,
            rec.rank == rec.r1 + rec.r2 - 1 and rec.rank >= 0 and rec.d == rec.r1 + 2 * rec.r2,
        )
