import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from oracles import DECOMP_T, DECOMP_T0, DECOMP_T1
from splitgame.decomposition import (
    FiniteMartingale,
    NotPositive,
    boundedness_check,
    make_positive,
    product_mismatches,
    random_martingale,
    split,
)
from splitgame.tree import Role


def test_worked_example():
    t = FiniteMartingale(2, DECOMP_T)
    t0, t1 = split(t)
    assert {x: t0.get(x) for x in DECOMP_T} == DECOMP_T0
    assert {x: t1.get(x) for x in DECOMP_T} == DECOMP_T1
    assert t0.get("00") * t1.get("00") == 2
    rep = boundedness_check(t, t0, t1, "00")
    assert (rep.max_t, rep.max_t0, rep.max_t1) == (2, F(4, 3), F(3, 2))


def test_constant_martingale():
    t = FiniteMartingale.constant(4)
    assert make_positive(t, 1) == t
    t0, t1 = split(t)
    assert set(t0.values.values()) == {1} == set(t1.values.values())
    rep = boundedness_check(t, t0, t1, "0110")
    assert (rep.max_t, rep.max_t0, rep.max_t1) == (1, 1, 1)


def test_make_positive_example():
    t = FiniteMartingale(1, {"": F(1), "0": F(0), "1": F(2)})
    p = make_positive(t, 1)
    assert (p["0"], p["1"]) == (F(1, 2), F(3, 2))
    with pytest.raises(ValueError):
        make_positive(t, 0)
    with pytest.raises(NotPositive):
        split(t)


def test_rejects_non_martingales():
    with pytest.raises(ValueError):
        FiniteMartingale(1, {"": F(1), "0": F(1), "1": F(1, 2)})
    with pytest.raises(ValueError):
        FiniteMartingale(1, {"": F(1), "0": F(1)})


def test_roles_match_parity_convention():
    t0, t1 = split(FiniteMartingale(2, DECOMP_T))
    assert t0.role is Role.EVEN and t1.role is Role.ODD
    assert t1.bets("") and not t0.bets("")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 8))
def test_split_identities(seed, depth):
    rng = random.Random(seed)
    raw = random_martingale(rng, depth)
    t = make_positive(raw, F(rng.randint(1, 4), rng.randint(1, 4)))
    assert t.minimum > 0 and t[""] == 1
    t0, t1 = split(t)
    assert t0.validate() == [] and t1.validate() == []
    assert product_mismatches(t, t0, t1) == []
    prefix = "".join(rng.choice("01") for _ in range(depth))
    assert boundedness_check(t, t0, t1, prefix).ok


def test_make_positive_floor():
    rng = random.Random(1)
    for _ in range(50):
        assert make_positive(random_martingale(rng, 5), 1).minimum >= F(1, 2)
