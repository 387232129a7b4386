from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, settings, strategies as st

from slicenum.lens import (
    DTable,
    LensSpace,
    _recursion,
    conjugate,
    d_invariants,
    d_oracle_ellipsoid,
    d_oracle_plumbing,
    reverse_orientation,
)


def lens_spaces(p_max):
    return st.integers(2, p_max).flatmap(
        lambda p: st.integers(1, p - 1).filter(lambda q: gcd(p, q) == 1).map(
            lambda q: LensSpace(p, q)))


def test_s3():
    assert d_invariants(LensSpace(1, 0)).values == (Fraction(0),)


def test_l21():
    assert sorted(d_invariants(LensSpace(2, 1)).values) == [Fraction(-1, 4), Fraction(1, 4)]


def test_l31():
    vals = d_invariants(LensSpace(3, 1)).values
    assert sorted(vals) == [Fraction(-1, 6), Fraction(-1, 6), Fraction(1, 2)]
    assert all(12 % v.denominator == 0 for v in vals)


def test_table_matches_reference_recursion():
    for p in range(2, 40):
        for q in range(1, p):
            if gcd(p, q) == 1:
                t = d_invariants(LensSpace(p, q))
                assert list(t.values) == [_recursion(p, q, i) for i in range(p)]


@pytest.mark.parametrize("p,q", [(p, q) for p in range(2, 16) for q in range(1, p) if gcd(p, q) == 1])
def test_recursion_matches_both_oracles(p, q):
    y = LensSpace(p, q)
    t = d_invariants(y)
    assert t == d_oracle_plumbing(y)
    if len(y.plumbing_weights()) <= 7:  # enumeration is exponential in chain length
        assert t == d_oracle_ellipsoid(y)


@given(lens_spaces(400))
@settings(max_examples=60)
def test_recursion_matches_chain_oracle(y):
    assert d_invariants(y) == d_oracle_plumbing(y)


@given(lens_spaces(300))
def test_conjugation_symmetry(y):
    t = d_invariants(y)
    for i in range(y.p):
        j = conjugate(y, i)
        assert conjugate(y, j) == i
        assert t[i] == t[j]


def test_orbits_of_l15_4():
    y = LensSpace(15, 4)
    orbits = {frozenset((i, conjugate(y, i))) for i in range(15)}
    assert len(orbits) == 8


def test_conjugate_l51_35():
    y = LensSpace(51, 35)
    t = d_invariants(y)
    assert conjugate(y, 0) == 34
    assert t[0] == t[34]
    with pytest.raises(ValueError):
        conjugate(y, 51)


@given(lens_spaces(200))
def test_reverse_is_involution(y):
    t = d_invariants(y)
    r = reverse_orientation(t)
    assert r.space.orientation == "reversed"
    assert r.values == tuple(-v for v in t.values)
    assert reverse_orientation(r) == t
    assert d_invariants(y.reversed()) == r


@given(lens_spaces(300))
def test_denominators_divide_4p(y):
    for v in d_invariants(y).values:
        assert (4 * y.p) % v.denominator == 0


def test_json_round_trip():
    t = d_invariants(LensSpace(51, 35).reversed())
    assert DTable.from_json(t.to_json()) == t


def test_invalid_lens():
    for p, q in [(0, 1), (6, 4), (5, 5), (1, 3)]:
        with pytest.raises(ValueError):
            LensSpace(p, q)
    with pytest.raises(ValueError):
        DTable(LensSpace(3, 1), (0, 0))
