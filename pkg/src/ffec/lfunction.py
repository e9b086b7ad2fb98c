"""L-function of E/F_q(t) as an integer polynomial in T.

The Euler product runs over places of degree <= N (plus a few guard degrees
while that stays cheap).  Places of degree d are represented by Frobenius
orbits of F_{q^d} generators, so no factorisation is needed: the local trace is
minus the character sum of the locally minimal cubic reduced at a root.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .curve import EllipticCurve, ReductionData, minimal_local_coefficients
from .errors import AuditError, DomainError, NumericError, ResourceError
from .ffcurve import COUNT_CAP, FFCurve
from .funcfield import Place, Poly, RationalFunction, count_irreducibles
from .gf import FiniteField, embedding, extension_field

GUARD = 3
GUARD_LIMIT = 5_000  # largest residue field used for the vanishing guard
AUDIT_TOL = 1e-6
_CHUNK = 4_000_000


def precision_bits() -> int:
    try:
        return max(53, int(os.environ.get("FFEC_PRECISION_BITS", "128")))
    except ValueError:
        return 128


@dataclass(frozen=True)
class LocalFactor:
    place: Place | None  # None when only the orbit representative is known
    degree: int
    reduction: str  # good | split-mult | nonsplit-mult | additive
    a_v: int
    q_v: int = 0  # size of the residue field

    def inverse_factor(self) -> dict[int, int]:
        """Sparse coefficients of the factor whose inverse enters the product."""
        d = self.degree
        if self.reduction == "good":
            return {0: 1, d: -self.a_v, 2 * d: self.q_v}
        if self.reduction.endswith("mult"):
            return {0: 1, d: -self.a_v}
        return {0: 1}

    def to_json(self) -> dict:
        return {"place": None if self.place is None else str(self.place), "degree": self.degree, "reduction": self.reduction, "a_v": self.a_v}


# ---------------------------------------------------------------------------
# vectorised helpers over a tabled field


def _vec_inv(F: FiniteField, a: np.ndarray) -> np.ndarray:
    t = F._tables
    if np.any(a == 0):
        raise ZeroDivisionError("inverse of zero")
    return t["exp"][(-t["log"][a]) % (F.q - 1)]


def _vec_eval(f: Poly, big: FiniteField, xs: np.ndarray) -> np.ndarray:
    emb = embedding(f.field, big)
    acc = np.zeros_like(xs)
    for c in reversed(f.c):
        acc = big.vec_add(big.vec_mul(acc, xs), np.full_like(xs, emb(c)))
    return acc


def _vec_eval_rational(x: RationalFunction, big: FiniteField, xs: np.ndarray) -> np.ndarray:
    return big.vec_mul(_vec_eval(x.num, big, xs), _vec_inv(big, _vec_eval(x.den, big, xs)))


def _traces(big: FiniteField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """-sum_x chi(x^3 + a_j x + b_j) for every j, vectorised in chunks."""
    xs = np.arange(big.q, dtype=np.int64)
    x3 = big.vec_mul(big.vec_mul(xs, xs), xs)
    out = np.zeros(len(a), dtype=np.int64)
    rows = max(1, _CHUNK // big.q)
    for s in range(0, len(a), rows):
        aa = a[s : s + rows, None]
        bb = b[s : s + rows, None]
        f = big.vec_add(big.vec_add(x3[None, :], big.vec_mul(aa, xs[None, :])), bb)
        out[s : s + rows] = -big.vec_chi(f).sum(axis=1)
    return out


def orbit_representatives(F: FiniteField, d: int) -> tuple[FiniteField, np.ndarray]:
    """One root in F_{q^d} of every monic irreducible of degree d over F_q."""
    big = extension_field(F, d)
    if d == 1:
        return big, np.arange(F.q, dtype=np.int64)
    n = big.q - 1
    idx = np.arange(n, dtype=np.int64)
    cur = idx.copy()
    mn = idx.copy()
    exact = np.ones(n, dtype=bool)
    for _ in range(d - 1):
        cur = (cur * F.q) % n
        mn = np.minimum(mn, cur)
        exact &= cur != idx
    reps = big._tables["exp"][idx[exact & (mn == idx)]]
    if len(reps) != count_irreducibles(F.q, d):
        raise AuditError("orbit count disagrees with the irreducible count")
    return big, np.sort(reps)


def minimal_polynomial(F: FiniteField, big: FiniteField, alpha: int, d: int) -> Poly:
    emb = embedding(F, big)
    coeffs = [1]
    root = alpha
    for _ in range(d):
        # multiply by (X - root)
        new = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i + 1] = big.add(new[i + 1], c)
            new[i] = big.sub(new[i], big.mul(c, root))
        coeffs = new
        root = big.pow(root, F.q)
    return Poly(F, [emb.back(c) for c in coeffs])


def _check_local(red: ReductionData, a_v: int, q_v: int) -> None:
    kind = red.reduction
    expected = {"split-mult": 1, "nonsplit-mult": -1, "additive": 0}.get(kind)
    if kind == "good":
        if a_v * a_v > 4 * q_v:
            raise AuditError(f"Hasse bound violated at {red.place}")
    elif a_v != expected:
        raise AuditError(f"local trace {a_v} contradicts {kind} reduction at {red.place}")


def local_factors(curve: EllipticCurve, d: int, with_places: bool = False) -> list[LocalFactor]:
    """Local data for every place of degree d (the infinite place counts as degree 1)."""
    curve.require_trace_zero()
    F = curve.field
    inv = curve.invariants
    big, reps = orbit_representatives(F, d)
    q_v = F.q**d
    if q_v > COUNT_CAP:
        raise ResourceError(f"residue field of size {q_v} exceeds the counting cap {COUNT_CAP}")
    bad = [(v, r) for v, r in inv.local.items() if not v.is_infinite and v.degree == d]
    special = {}
    for v, red in bad:
        hit = np.nonzero(_vec_eval(v.pi, big, reps) == 0)[0]
        if len(hit) != 1:
            raise AuditError(f"place {v} does not match exactly one orbit")
        special[int(hit[0])] = red
    keep = np.ones(len(reps), dtype=bool)
    keep[list(special)] = False
    a = np.zeros(len(reps), dtype=np.int64)
    b = np.zeros(len(reps), dtype=np.int64)
    if keep.any():
        a[keep] = _vec_eval_rational(curve.A, big, reps[keep])
        b[keep] = _vec_eval_rational(curve.B, big, reps[keep])
    for j, red in special.items():
        Am, Bm = minimal_local_coefficients(curve.model, red)
        a[j] = Am.eval_in(big, int(reps[j]))
        b[j] = Bm.eval_in(big, int(reps[j]))
    traces = _traces(big, a, b)
    out = []
    for j, alpha in enumerate(reps.tolist()):
        red = special.get(j)
        tr = int(traces[j])
        kind = "good" if red is None else red.reduction
        if red is not None:
            _check_local(red, tr, q_v)
        elif tr * tr > 4 * q_v:
            raise AuditError("Hasse bound violated at a good place")
        place = None
        if red is not None:
            place = red.place
        elif with_places:
            place = Place.finite(minimal_polynomial(F, big, alpha, d))
        out.append(LocalFactor(place, d, kind, tr, q_v))
    if d == 1:
        vinf = Place.infinite(F)
        red = inv.local[vinf]
        Am, Bm = minimal_local_coefficients(curve.model, red)
        tr = int(_traces(F, np.array([Am.eval_in(F, 0)]), np.array([Bm.eval_in(F, 0)]))[0])
        _check_local(red, tr, F.q)
        out.append(LocalFactor(vinf, 1, red.reduction, tr, F.q))
    return out


def count_points(curve: EllipticCurve, place: Place, method: str = "auto") -> int:
    """#E(k_v) of the reduction at a good place (projective points)."""
    red = curve.invariants.local.get(place)
    if red is not None and red.f_v:
        raise DomainError(f"bad reduction at {place}")
    F = curve.field
    if place.is_infinite:
        big, alpha = F, 0
    else:
        big = extension_field(F, place.degree)
        roots = np.nonzero(_vec_eval(place.pi, big, np.arange(big.q, dtype=np.int64)) == 0)[0]
        alpha = int(roots[0])
    if red is None:
        red = ReductionData(place, "I0", 0, 0, "none", 0, 0, 0)
    Am, Bm = minimal_local_coefficients(curve.model, red)
    return FFCurve(big, Am.eval_in(big, alpha), Bm.eval_in(big, alpha)).count(method)


# ---------------------------------------------------------------------------


def _series_divide(series: list[int], factor: dict[int, int]) -> None:
    """series <- series / factor in Z[[T]] (factor has constant term 1), in place."""
    terms = [(k, c) for k, c in factor.items() if k > 0 and c]
    for n in range(len(series)):
        acc = series[n]
        for k, c in terms:
            if k <= n:
                acc -= c * series[n - k]
        series[n] = acc


def divide_by_linear(coeffs: Sequence[int], q: int) -> list[int] | None:
    """Exact quotient by (1 - qT), or None if it does not divide."""
    if len(coeffs) <= 1:
        return None
    h = []
    prev = 0
    for c in coeffs[:-1]:
        prev = c + q * prev
        h.append(prev)
    if coeffs[-1] - (-q) * h[-1] != 0:
        return None
    return h


def analytic_rank(coeffs: Sequence[int], q: int) -> int:
    """Multiplicity of T = 1/q as a root of L."""
    r = 0
    c = list(coeffs)
    while True:
        h = divide_by_linear(c, q)
        if h is None:
            return r
        c, r = h, r + 1


@dataclass
class LPolynomial:
    q: int
    coeffs: tuple[int, ...]
    guard_order: int = 0
    factors: list[LocalFactor] = field(default_factory=list, repr=False)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @functools.cached_property
    def r_an(self) -> int:
        return analytic_rank(self.coeffs, self.q)

    def __call__(self, T):
        return sum(c * T**i for i, c in enumerate(self.coeffs))

    def functional_equation_sign(self) -> int:
        """eps with c_{N-i} = eps q^{N-2i} c_i (exact)."""
        N, q, c = self.N, self.q, self.coeffs
        for eps in (1, -1):
            if all(c[N - i] * q ** max(0, 2 * i - N) == eps * q ** max(0, N - 2 * i) * c[i] for i in range(N + 1)):
                return eps
        raise AuditError("coefficients violate the functional equation")

    @functools.cached_property
    def _roots(self) -> tuple[list, int]:
        """(inverse roots of the part coprime to 1 - qT, r_an) at working precision."""
        c = list(self.coeffs)
        for _ in range(self.r_an):
            c = divide_by_linear(c, self.q)
        if len(c) == 1:
            return [], self.r_an
        bits = precision_bits()
        with mpmath.workprec(bits):
            try:
                roots = mpmath.polyroots(c, maxsteps=400, extraprec=bits)
            except mpmath.libmp.NoConvergence as exc:
                raise NumericError(f"root finding failed for {c}: {exc}") from None
            # Newton polish against the exact integer coefficients
            polished = []
            for z in roots:
                for _ in range(4):
                    f = mpmath.polyval(c, z)
                    df = mpmath.polyval([a * (len(c) - 1 - i) for i, a in enumerate(c[:-1])], z)
                    if df == 0:
                        break
                    z = z - f / df
                polished.append(mpmath.mpc(z))
        return polished, self.r_an

    @property
    def inverse_roots(self) -> list[complex]:
        rest, r = self._roots
        return [complex(self.q)] * r + [complex(z) for z in rest]

    def zero_angles(self) -> list[float]:
        """theta in [0, 2pi) with T = q^{-1} e^{-i theta}; exact zeros at T = 1/q give 0."""
        rest, r = self._roots
        two_pi = 2 * math.pi
        out = [0.0] * r
        for z in rest:
            th = float(mpmath.arg(z)) % two_pi
            out.append(0.0 if th >= two_pi else th)
        return sorted(out)

    def rh_max_dev(self) -> float:
        """max | |alpha| - q | / q."""
        rest, _ = self._roots
        if not rest:
            return 0.0
        return max(float(abs(abs(z) - self.q) / self.q) for z in rest)

    def fe_max_dev(self) -> float:
        """Greedy matching of {alpha} against {q^2/alpha}, relative deviation."""
        rest, _ = self._roots
        if not rest:
            return 0.0
        q2 = self.q**2
        targets = [q2 / z for z in rest]
        used = [False] * len(targets)
        worst = 0.0
        for z in rest:
            best, bi = None, -1
            for i, w in enumerate(targets):
                if not used[i]:
                    dist = abs(z - w)
                    if best is None or dist < best:
                        best, bi = dist, i
            used[bi] = True
            worst = max(worst, float(best / self.q))
        return worst


def guard_degree(q: int, N: int, guard: int = GUARD, limit: int = GUARD_LIMIT) -> int:
    g = 0
    while g < guard and q ** (N + g + 1) <= limit:
        g += 1
    return g


def l_polynomial(curve: EllipticCurve, guard: int = GUARD) -> LPolynomial:
    curve.require_trace_zero()
    inv = curve.invariants
    q = curve.field.q
    N = inv.nE - 4
    if N < 0:
        raise AuditError(f"conductor degree {inv.nE} < 4 for a non-isotrivial curve")
    if N > 0 and q**N > COUNT_CAP:
        raise ResourceError(f"L-function of degree {N} needs residue fields beyond {COUNT_CAP}")
    M = N + guard_degree(q, N, guard)
    series = [1] + [0] * M
    factors: list[LocalFactor] = []
    for d in range(1, M + 1):
        for lf in local_factors(curve, d):
            _series_divide(series, lf.inverse_factor())
            if lf.place is not None:
                factors.append(lf)
    if any(series[N + 1 :]):
        raise AuditError(f"series does not terminate at degree {N}: {series}")
    L = LPolynomial(q, tuple(series[: N + 1]), M, factors)
    if abs(L.coeffs[-1]) != q**N:
        raise AuditError("leading coefficient is not +-q^N")
    L.functional_equation_sign()
    return L


# ---------------------------------------------------------------------------
# explicit formula


def fejer_eval(Y: int, theta: float) -> float:
    """(sin(Y theta/2))^2 / (Y sin(theta/2)^2), equal to Y at theta = 0 mod 2pi."""
    if Y < 1:
        raise DomainError("Y must be >= 1")
    s = math.sin(theta / 2)
    if abs(s) < 1e-4:
        # near the removable singularity the Fourier sum is the stable form
        return 1.0 + 2.0 * sum((1 - m / Y) * math.cos(m * theta) for m in range(1, Y))
    return math.sin(Y * theta / 2) ** 2 / (Y * s * s)


def fejer_coefficient(Y: int, m: int) -> Fraction:
    return Fraction(Y - abs(m), Y) if abs(m) < Y else Fraction(0)


def power_sums(coeffs: Sequence[int], count: int) -> list[int]:
    """p_m = sum alpha_j^m for m = 0..count-1 (Newton's identities, exact)."""
    N = len(coeffs) - 1
    e = [(-1) ** i * c for i, c in enumerate(coeffs)]
    p = [N]
    for m in range(1, count):
        acc = (-1) ** (m - 1) * m * e[m] if m <= N else 0
        for i in range(1, min(m, N + 1)):
            acc += (-1) ** (i - 1) * e[i] * p[m - i]
        p.append(acc)
    return p


@dataclass(frozen=True)
class AuditReport:
    Y: int
    zero_side: float
    zero_side_split: float
    coeff_side: Fraction
    gap: float

    def to_json(self) -> dict:
        return {"Y": self.Y, "zero_side": self.zero_side, "coeff_side": float(self.coeff_side), "gap": self.gap}


def explicit_formula_audit(L: LPolynomial, Y: int, tol: float = AUDIT_TOL) -> AuditReport:
    """Sum of F_Y over the zeros versus the Fourier side computed from the
    integer coefficients alone."""
    if Y < 1:
        raise DomainError("Y must be >= 1")
    angles = L.zero_angles()
    zero_all = math.fsum(fejer_eval(Y, th) for th in angles)
    zero_split = L.r_an * Y + math.fsum(fejer_eval(Y, th) for th in angles[L.r_an :])
    if abs(zero_all - zero_split) > tol:
        raise AuditError("zero sums disagree")
    p = power_sums(L.coeffs, Y)
    coeff = Fraction(L.N) + 2 * sum((fejer_coefficient(Y, m) * Fraction(p[m], L.q**m) for m in range(1, Y)), Fraction(0))
    gap = abs(zero_all - float(coeff))
    if gap > tol:
        raise AuditError(f"explicit formula gap {gap:.3e} at Y={Y}")
    return AuditReport(Y, zero_all, zero_split, coeff, gap)


def brumer_Y(nE: int, q: int) -> int:
    """ceil(2 ln nE / ln q), ties settled by comparing q^Y with nE^2."""
    if nE <= 1:
        raise DomainError("needs nE > 1")
    x = 2 * math.log(nE) / math.log(q)
    n = round(x)
    if abs(x - n) < 1e-12:
        t, target = q**n, nE * nE
        return n if t >= target else n + 1
    return math.ceil(x)


def lfunction_report(L: LPolynomial, nE: int | None = None, Y: int | None = None) -> dict:
    if Y is None:
        Y = brumer_Y(nE, L.q) if nE and nE > 1 else 1
    audit = explicit_formula_audit(L, Y)
    return {
        "N": L.N,
        "coeffs": list(L.coeffs),
        "r_an": L.r_an,
        "angles": [round(a, 12) for a in L.zero_angles()],
        "rh_max_dev": L.rh_max_dev(),
        "fe_max_dev": L.fe_max_dev(),
        "fe_sign": L.functional_equation_sign(),
        "audit": {"Y": audit.Y, "gap": audit.gap},
        "guard_order": L.guard_order,
        "precision_bits": precision_bits(),
    }
