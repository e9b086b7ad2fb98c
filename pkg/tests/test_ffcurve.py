import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffec.ffcurve import FFCurve
from ffec.gf import embedding, gf


def nonsingular(F, rng):
    while True:
        E = FFCurve(F, rng.randrange(F.q), rng.randrange(F.q))
        if not E.is_singular():
            return E


def test_small_count():
    E = FFCurve(gf(5), 1, 1)
    assert E.count() == 9
    assert len(list(E.points())) == 9


@pytest.mark.parametrize("q", [125, 625, 14641])
def test_bsgs_agrees_with_exhaustive(q):
    F = gf(q)
    rng = random.Random(q)
    for _ in range(3):
        E = nonsingular(F, rng)
        assert E.count_bsgs() == E.count_exhaustive()


@given(st.sampled_from([5, 7, 11, 13]), st.integers(0, 10**6))
def test_trace_over_quadratic_extension(p, seed):
    F, F2 = gf(p), gf(p * p)
    E = nonsingular(F, random.Random(seed))
    e = embedding(F, F2)
    E2 = FFCurve(F2, e(E.a), e(E.b))
    a = p + 1 - E.count()
    assert p * p + 1 - E2.count() == a * a - 2 * p


@given(st.sampled_from([5, 7, 25, 49, 125]), st.integers(0, 10**6))
def test_hasse(q, seed):
    E = nonsingular(gf(q), random.Random(seed))
    assert (E.count() - q - 1) ** 2 <= 4 * q


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_group_law(seed):
    rng = random.Random(seed)
    E = nonsingular(gf(49), rng)
    P, Q, R = (E.random_point(rng) for _ in range(3))
    assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))
    assert E.add(P, Q) == E.add(Q, P)
    assert E.add(P, E.neg(P)) is None
    assert E.contains(E.add(P, Q))
    n = E.count()
    assert E.mul(n, P) is None
    assert n % E.order(P) == 0


def test_order_divides_group_exponent():
    E = FFCurve(gf(7), 3, 2)
    n = E.count()
    orders = {E.order(P) for P in E.points() if P is not None}
    assert math.lcm(*orders) <= n and all(n % o == 0 for o in orders)
