import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffec.analysis import bundled_number_fields
from ffec.bounds import (
    BoundContext,
    NumberFieldRecord,
    brumer_bound_long,
    brumer_bound_weakeasy,
    c0,
    c0_interval,
    check_friedman,
    check_height_gap,
    check_regulator_bound,
    height_gap_bound,
    long_interval,
    rank_bound,
    read_number_fields,
    scan_long_vs_weakeasy,
)
from ffec.errors import DomainError, IngestionError


def ctx(**kw):
    base = dict(q=5, p=5, s=0, nE=6, hE=Fraction(1), r=1, r_an=1, reg_lo=Fraction(1, 2), reg_hi=Fraction(1, 2))
    base.update(kw)
    return BoundContext(**base)


def test_c0_value():
    assert float(c0(5)) == pytest.approx(5.05525174e-19, rel=1e-8)
    iv = c0_interval(5)
    assert iv.a <= c0(5) <= iv.b


@given(st.sampled_from([5, 7, 11, 25, 49, 125]), st.integers(0, 3), st.integers(0, 3))
def test_c0_structure(q, g, s):
    p = min(x for x in (5, 7, 11) if q % x == 0)
    ratio = c0(q, g, p, s) / c0(q, g, p, s + 1)
    assert float(ratio) == pytest.approx(p * p, rel=1e-30)
    # shrinks by more than 10^23 per unit of g
    assert c0(q, g + 1, p, s) < c0(q, g, p, s) * mpmath.mpf(10) ** -23


def test_c0_domain():
    with pytest.raises(DomainError):
        c0(9)
    with pytest.raises(DomainError):
        c0(5, g=-1)


def test_conductor_bound_examples():
    assert float(brumer_bound_long(10, 5)) == pytest.approx(54.609, rel=0.01)
    assert float(brumer_bound_weakeasy(10, 5)) == pytest.approx(226.39, rel=0.01)
    iv = long_interval(10, 5)
    assert iv.a <= brumer_bound_long(10, 5) <= iv.b
    with pytest.raises(DomainError):
        brumer_bound_long(1, 5)


def test_scan_finds_no_failures():
    assert scan_long_vs_weakeasy() == []


@given(st.integers(3, 5000), st.sampled_from([5, 7, 11, 25]), st.integers(0, 2))
def test_weakeasy_increasing_in_nE(n, q, g):
    assert brumer_bound_weakeasy(n + 1, q, g) > brumer_bound_weakeasy(n, q, g)


def test_height_gap_bound_value():
    b = height_gap_bound(Fraction(2), 5)
    assert float(b) == pytest.approx(2 * 10**-15.5)
    assert float(height_gap_bound(Fraction(2), 5, s=1)) == pytest.approx(2 * 10**-15.5 / 25)


def test_height_gap_check():
    assert check_height_gap(Fraction(1, 20), ctx(s=1)).holds
    assert not check_height_gap(Fraction(1, 10**20), ctx()).holds
    with pytest.raises(DomainError):
        check_height_gap(Fraction(1), ctx(), torsion=True)


def test_regulator_bound_branches():
    rep0 = check_regulator_bound(ctx(r=0, reg_lo=Fraction(1), reg_hi=Fraction(1)))
    assert rep0.branch == "rank0" and rep0.holds
    vac = check_regulator_bound(ctx(hE=Fraction(1, 12)))
    assert vac.branch == "vacuous" and vac.holds
    gen = check_regulator_bound(ctx(r=2))
    assert gen.branch == "generic" and gen.holds and gen.log10_margin > 30
    bad = check_regulator_bound(ctx(reg_lo=Fraction(1, 10**40), reg_hi=Fraction(1, 10**40)))
    assert not bad.holds and bad.log10_margin < 0


def test_rank_bound_large_conductor():
    rep = rank_bound(ctx(nE=6, hE=Fraction(1)))
    assert rep.branch == "large-conductor" and rep.holds
    assert rep.bounds["long"] <= rep.bounds["weakeasy"]
    # nE > 12 h(E) cannot happen for a real curve; the report flags it
    assert not rank_bound(ctx(nE=20, hE=Fraction(1))).holds


def test_rank_bound_small_conductor_synthetic():
    rep = rank_bound(ctx(nE=2, r_an=0, g=1))
    assert rep.branch == "small-conductor" and rep.bounds["easy"] == 2 and rep.holds
    assert not rank_bound(ctx(nE=2, r_an=3)).holds
    with pytest.raises(DomainError):
        rank_bound(ctx(r_an=None))


def test_friedman_on_rationals():
    rep = check_friedman(NumberFieldRecord("1.1.1.1", 1, 1, 0, "1", 2))
    assert rep.holds1 and rep.holds2 and rep.rank == 0
    assert rep.lhs1 == mpmath.mpf("0.5")
    assert float(rep.rhs1) == pytest.approx(0.0031 * math.exp(0.241 + 0.497), rel=1e-12)


def test_friedman_on_bundled_table():
    recs, bad = read_number_fields(bundled_number_fields().splitlines())
    assert not bad and len(recs) >= 20
    for rec in recs:
        rep = check_friedman(rec)
        assert rep.holds1 and rep.holds2 and rep.dirichlet_ok, rec.label


def test_friedman_failure_is_reported():
    rep = check_friedman(NumberFieldRecord("toy", 2, 2, 0, "0.001", 2))
    assert not rep.holds1 and not rep.holds2


HEADER = "label,d,r1,r2,regulator,w"


@pytest.mark.parametrize(
    "row,msg",
    [
        ("x,2,1,1,1.0,2", "d != r1"),
        ("x,2,2,0,-1,2", "positive"),
        ("x,2,2,0,1.0,3", "even"),
        ("x,2,2,0,abc,2", "regulator"),
        ("x,2,2,0,1.0", "6 fields"),
        ("x,two,2,0,1.0,2", "malformed"),
    ],
)
def test_csv_row_errors(row, msg):
    good, bad = read_number_fields([HEADER, "1.1.1.1,1,1,0,1,2", row])
    assert len(good) == 1
    assert bad[0][0] == 3 and msg in bad[0][1]


def test_csv_header_and_empty():
    assert read_number_fields([]) == ([], [])
    assert read_number_fields(["# only a comment"]) == ([], [])
    with pytest.raises(IngestionError):
        read_number_fields(["name,d,r1,r2,regulator,w"])
