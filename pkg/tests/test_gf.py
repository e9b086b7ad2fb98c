import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffec.errors import DomainError, FieldMismatchError, ResourceError
from ffec.gf import embedding, extension_field, gf, inv, lex_first_irreducible, prime_power, sqrt_or_none

FIELDS = [5, 7, 25, 49, 125, 11]


@st.composite
def field_and_elements(draw, n=3):
    F = gf(draw(st.sampled_from(FIELDS)))
    return (F, *[draw(st.integers(0, F.q - 1)) for _ in range(n)])


@given(field_and_elements())
def test_ring_axioms(data):
    F, a, b, c = data
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.sub(F.add(a, b), b) == a


@given(field_and_elements(1))
def test_inverse_and_fermat(data):
    F, a = data
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.q - 1) == 1
    assert F.pow(a, F.q) == a


@given(field_and_elements(2))
def test_character_is_multiplicative(data):
    F, a, b = data
    assert F.chi(F.mul(a, b)) == F.chi(a) * F.chi(b)


@given(field_and_elements(1))
def test_sqrt_roundtrip(data):
    F, a = data
    r = F.sqrt(F.mul(a, a))
    assert r is not None and F.mul(r, r) == F.mul(a, a)
    assert r == min(r, F.neg(r))


def test_table_free_sqrt_matches():
    F = gf(49)
    for a in range(F.q):
        s = F.sqrt(a)
        if s is None:
            assert F.chi(a) == -1
        else:
            assert F.mul(s, s) == a


def test_lexicographic_modulus():
    # over F_5 the first irreducible quadratic (constant term smallest) is u^2 + 2
    assert lex_first_irreducible(5, 2) == (2, 0, 1)
    assert gf(25).modulus == (2, 0, 1)


def test_prime_power_and_rejections():
    assert prime_power(125) == (5, 3)
    with pytest.raises(DomainError):
        gf(6)
    with pytest.raises(DomainError):
        gf(9)  # characteristic 3 is excluded
    with pytest.raises(ResourceError):
        extension_field(gf(5), 30)


@given(st.sampled_from([(5, 25), (5, 125), (25, 625), (7, 49)]), st.data())
def test_embedding_is_a_homomorphism(pair, data):
    small, big = gf(pair[0]), gf(pair[1])
    e = embedding(small, big)
    a = data.draw(st.integers(0, small.q - 1))
    b = data.draw(st.integers(0, small.q - 1))
    assert e(small.add(a, b)) == big.add(e(a), e(b))
    assert e(small.mul(a, b)) == big.mul(e(a), e(b))
    assert e.back(e(a)) == a


def test_field_elements_and_mismatch():
    F, G = gf(5), gf(7)
    x = F(3)
    assert x * 2 == 1
    assert inv(x) * x == 1
    assert sqrt_or_none(F(2)) is None
    assert sqrt_or_none(F(4)) in (F(2), F(3))
    with pytest.raises(FieldMismatchError):
        _ = x + G(1)
    with pytest.raises(DomainError):
        inv(F(0))


def test_json_roundtrip():
    F = gf(125)
    assert type(F).from_json(F.to_json()) == F
