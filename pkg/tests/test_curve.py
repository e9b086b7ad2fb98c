import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffec.curve import EllipticCurve, WeierstrassModel, global_invariants, inseparability_degree, parse_curve
from ffec.errors import DomainError, IngestionError, IsotrivialError
from ffec.funcfield import Place, Poly, RationalFunction
from ffec.gf import gf


def kodaira_at_zero(q, A, B):
    E = EllipticCurve.short(q, A, B)
    F = E.field
    return E.invariants.local[Place.finite(Poly.t(F))]


def test_legendre_invariants():
    E = EllipticCurve.from_json({"q": 5, "a": [0, "-1-t", 0, "t", 0]})
    inv = E.invariants
    assert inv.deg_delta == 12 and inv.hE == 1
    assert inv.nE == 4 and inv.s == 0
    kinds = [(str(r.place), r.kodaira) for r in inv.bad]
    assert kinds == [("(t)", "I2"), ("(t+4)", "I2"), ("inf", "I2*")]


@pytest.mark.parametrize(
    "A,B,kod",
    [
        ("t", "t", "II"),
        ("t", "t^2", "III"),
        ("t^2", "t^2", "IV"),
        ("t^2", "t^3 + t^4", "I0*"),
        ("t^3", "t^4", "IV*"),
        ("t^3", "t^5", "III*"),
        ("t^4", "t^5", "II*"),
        ("-3", "2 + t^3", "I3"),
        ("-3t^2", "2t^3 + t^5", "I2*"),
        ("t^5", "t^7", "II"),  # non-minimal at t: scaled down once
    ],
)
def test_kodaira_symbols(A, B, kod):
    red = kodaira_at_zero(5, A, B)
    assert red.kodaira == kod
    assert red.f_v == (1 if re.fullmatch(r"I\d+", kod) else 2)


def test_split_versus_nonsplit():
    # node slope residue is 3: a non-square mod 5 and 7, a square mod 11
    assert kodaira_at_zero(5, "-3", "2 + t^2").mult_kind == "nonsplit"
    assert kodaira_at_zero(7, "-3", "2 + t^2").mult_kind == "nonsplit"
    assert kodaira_at_zero(11, "-3", "2 + t^2").mult_kind == "split"


def test_degree_of_discriminant_is_multiple_of_twelve():
    for A, B in [("t", "1"), ("t^3+1", "t"), ("t^2+2", "t^5+t")]:
        assert EllipticCurve.short(7, A, B).invariants.deg_delta % 12 == 0


def test_isotrivial_detection():
    E = EllipticCurve.short(5, "t^2", "t^3")
    assert E.invariants.isotrivial and E.invariants.s is None
    with pytest.raises(IsotrivialError):
        E.require_trace_zero()
    with pytest.raises(IsotrivialError):
        inseparability_degree(RationalFunction.const(gf(5), 2))


def test_inseparability():
    assert EllipticCurve.short(5, "t^5", "1").invariants.s == 1
    assert EllipticCurve.short(5, "t^25", "1").invariants.s == 2
    assert EllipticCurve.short(5, "t", "1").invariants.s == 0


units = st.lists(st.integers(0, 4), min_size=1, max_size=4).filter(lambda c: any(c))


@given(units, units)
def test_change_of_model_leaves_invariants(num, den):
    F = gf(5)
    u = RationalFunction(Poly(F, num), Poly(F, den))
    m = WeierstrassModel.short(F, "t", "t^2 + 1")
    a, b = global_invariants(m), global_invariants(m.u_twist(u))
    assert (a.deg_delta, a.nE, a.s) == (b.deg_delta, b.nE, b.s)
    assert [r.kodaira for r in a.bad] == [r.kodaira for r in b.bad]


@given(st.lists(st.integers(0, 6), min_size=1, max_size=4), st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_short_model_roundtrip(xc, yc):
    F = gf(7)
    m = WeierstrassModel.from_ainvariants(F, [1, 2, "t", 0, "1+2t-t^3-2t^2"])
    x, y = RationalFunction(Poly(F, xc)), RationalFunction(Poly(F, yc))
    assert m.from_short(*m.to_short(x, y)) == (x, y)


def test_model_point_maps_onto_short_curve():
    F = gf(5)
    m = WeierstrassModel.from_ainvariants(F, [0, "-1-t", 0, "t", 0])
    X, Y = m.to_short(RationalFunction.zero(F), RationalFunction.zero(F))
    assert Y * Y == X * X * X + m.A * X + m.B


@pytest.mark.parametrize(
    "bad",
    [
        "{not json",
        {"A": "t", "B": "1"},
        {"q": 5, "A": "t"},
        {"q": 5, "A": "0", "B": "0"},
        {"q": 9, "A": "t", "B": "1"},
        {"q": 6, "A": "t", "B": "1"},
        {"q": 5, "a": [0, 1, 2]},
        {"q": 5, "A": "t/0", "B": "1"},
        [1, 2, 3],
    ],
)
def test_ingestion_errors(bad):
    with pytest.raises(IngestionError):
        parse_curve(bad)


def test_singular_model_rejected_directly():
    with pytest.raises(DomainError):
        WeierstrassModel.short(gf(5), 0, 0)
