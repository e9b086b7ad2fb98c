import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffec.analysis import load_corpus
from ffec.curve import EllipticCurve
from ffec.errors import AuditError, DomainError
from ffec.lfunction import (
    LPolynomial,
    analytic_rank,
    brumer_Y,
    count_points,
    divide_by_linear,
    explicit_formula_audit,
    fejer_coefficient,
    fejer_eval,
    l_polynomial,
    lfunction_report,
    power_sums,
)

SPECS = load_corpus()


@pytest.fixture(scope="module")
def corpus_L():
    out = {}
    for s in SPECS:
        E = EllipticCurve.from_json(s)
        out[s["label"]] = (E, l_polynomial(E))
    return out


def test_legendre_L_is_one(corpus_L):
    E, L = corpus_L["legendre-5"]
    assert L.coeffs == (1,) and L.N == 0 and L.r_an == 0
    assert L.zero_angles() == []


def test_degree_matches_conductor(corpus_L):
    for E, L in corpus_L.values():
        assert L.N == E.invariants.nE - 4
        assert abs(L.coeffs[-1]) == L.q**L.N


@given(st.integers(1, 40), st.floats(0, 2 * math.pi))
def test_fejer_kernel_nonnegative_and_bounded(Y, th):
    v = fejer_eval(Y, th)
    assert -1e-12 <= v <= Y + 1e-9


@given(st.integers(1, 40), st.floats(0, 2 * math.pi))
def test_fejer_closed_form_matches_fourier_sum(Y, th):
    series = 1.0 + 2.0 * sum(float(fejer_coefficient(Y, m)) * math.cos(m * th) for m in range(1, Y))
    assert math.isclose(fejer_eval(Y, th), series, abs_tol=1e-9)


@pytest.mark.parametrize("Y", [1, 2, 7, 30])
def test_fejer_value_at_zero_and_mean(Y):
    assert fejer_eval(Y, 0.0) == pytest.approx(Y)
    assert fejer_eval(Y, 1e-7) == pytest.approx(Y)
    n = 4096
    mean = sum(fejer_eval(Y, 2 * math.pi * k / n) for k in range(n)) / n
    assert mean == pytest.approx(1.0)
    assert fejer_coefficient(Y, Y) == 0 and fejer_coefficient(Y, 0) == 1
    with pytest.raises(DomainError):
        fejer_eval(0, 1.0)


def test_analytic_rank_examples():
    assert analytic_rank([1], 5) == 0
    assert analytic_rank([1, -10, 25], 5) == 2
    assert analytic_rank([1, 0, -25], 5) == 1
    assert analytic_rank([1, 0, 25], 5) == 0
    assert divide_by_linear([1, 0, -25], 5) == [1, 5]
    assert divide_by_linear([1, 1], 5) is None


def test_zero_angles_examples():
    L = LPolynomial(5, (1, 0, -25))
    assert L.r_an == 1
    assert L.zero_angles() == pytest.approx([0.0, math.pi])
    L2 = LPolynomial(7, (1, 0, 49))
    assert L2.zero_angles() == pytest.approx([math.pi / 2, 3 * math.pi / 2])
    assert L2.functional_equation_sign() == 1
    assert LPolynomial(5, (1, 0, -25)).functional_equation_sign() == -1


def test_functional_equation_violation_detected():
    with pytest.raises(AuditError):
        LPolynomial(5, (1, 3, 7)).functional_equation_sign()


def test_power_sums():
    # (1 - 2T)(1 - 3T): alpha = 2, 3
    assert power_sums([1, -5, 6], 4) == [2, 5, 13, 35]


def test_audit_on_example():
    rep = explicit_formula_audit(LPolynomial(5, (1, 0, -25)), 4)
    assert rep.coeff_side == Fraction(2) + 2 * Fraction(2, 4) * Fraction(25 * 2, 25)
    assert rep.gap < 1e-9


@pytest.mark.parametrize(
    "nE,q,Y",
    [(4, 5, 2), (25, 5, 4), (5, 5, 2), (7, 7, 2), (10, 7, 3), (49, 7, 4), (2, 5, 1), (126, 5, 7)],
)
def test_brumer_Y(nE, q, Y):
    assert brumer_Y(nE, q) == Y
    assert q**Y >= nE * nE and (Y == 0 or q ** (Y - 1) < nE * nE)


def test_corpus_rh_fe_and_audit(corpus_L):
    for label, (E, L) in corpus_L.items():
        assert L.rh_max_dev() < 1e-10, label
        assert L.fe_max_dev() < 1e-10, label
        assert len(L.zero_angles()) == L.N
        for Y in range(1, 11):
            assert explicit_formula_audit(L, Y).gap < 1e-6


def test_report_shape(corpus_L):
    E, L = corpus_L["n2-r1-7"]
    rep = lfunction_report(L, E.invariants.nE)
    assert rep["r_an"] == 1 and rep["N"] == 2


def test_point_count_matches_local_factor(corpus_L):
    E, L = corpus_L["t-1-7"]
    for lf in L.factors[:6]:
        if lf.reduction == "good":
            assert count_points(E, lf.place) == lf.q_v + 1 - lf.a_v
