from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from slicenum.forms import FormConstraints, enumerate_forms
from slicenum.knots import SliceQuery, TwoBridgeKnot, lookup_knot, record_for_two_bridge
from slicenum.lattice import GramMatrix
from slicenum.lens import LensSpace, d_invariants
from slicenum.obstruct import (
    DeterminantMismatch,
    characteristic_classes,
    check_form,
    slicing_obstruction,
)


def brute_min_squares(rows):
    """Minimal c Q^{-1} c per class c mod 2Q.

    c -> c -/+ 2 Q e_j changes the square by 4 (Q_jj -/+ c_j), so minima have
    |c_j| <= Q_jj and that box suffices.
    """
    from slicenum import intmat as im

    n = len(rows)
    box = max(rows[i][i] for i in range(n))
    inv = im.inverse(rows)
    best = {}
    for c in product(range(-box, box + 1), repeat=n):
        if any((c[i] - rows[i][i]) % 2 for i in range(n)):
            continue
        # class of c mod 2Q: coordinates of Q^{-1}(c - c0) / 2 mod 1
        x = [sum(Fraction(inv[i][j]) * c[j] for j in range(n)) for i in range(n)]
        key = tuple((xi / 2) % 1 for xi in x)
        val = sum(c[i] * x[i] for i in range(n))
        if key not in best or val < best[key]:
            best[key] = val
    return sorted(best.values())


def test_unimodular_class():
    (c,) = characteristic_classes(GramMatrix(((2, 1), (1, 1))))
    assert c.min_square == 2
    assert c.excess == 0


def test_det15_classes():
    g = GramMatrix(((2, 1), (1, 8)))
    classes = characteristic_classes(g)
    assert len(classes) == 15
    assert len({c.class_label for c in classes}) == 15
    assert sorted(c.min_square for c in classes) == brute_min_squares([[2, 1], [1, 8]])


def test_square_mod8_constant_along_classes():
    g = GramMatrix(((2, 1), (1, 8)))
    for c in characteristic_classes(g):
        assert 0 <= c.square_mod8 < 8
        assert (c.min_square - c.square_mod8) % 8 == 0


@given(st.sampled_from([5, 9, 15, 21, 45, 51]), st.data())
@settings(max_examples=20)
def test_class_minima_against_brute_force(det, data):
    forms = [g for n_even in (0, 1) for g in enumerate_forms(FormConstraints(1, det, n_even))]
    g = data.draw(st.sampled_from(forms))
    got = sorted(c.min_square for c in characteristic_classes(g))
    assert got == brute_min_squares([list(row) for row in g.entries])


def test_rank4_class_minima_against_brute_force():
    forms = enumerate_forms(FormConstraints(2, 15, 1))
    assert forms
    for g in forms:
        got = sorted(c.min_square for c in characteristic_classes(g))
        assert got == brute_min_squares([list(row) for row in g.entries])


def test_7_4_rank2_form_obstructed():
    y = LensSpace(15, 4)
    v = check_form(GramMatrix(((2, 1), (1, 8))), d_invariants(y))
    assert v.obstructed
    assert v.matchings_tried == 8 * 15
    assert all(r["fails"] in ("inequality", "parity") for r in v.refutations)


def test_unimodular_form_bounds_s3():
    v = check_form(GramMatrix(((2, 1), (1, 1))), d_invariants(LensSpace(1, 0)))
    assert not v.obstructed
    assert v.witness is not None


def test_determinant_mismatch():
    with pytest.raises(DeterminantMismatch):
        check_form(GramMatrix(((2, 1), (1, 3))), d_invariants(LensSpace(15, 4)))


def test_conjugation_flag_is_monotone():
    y = LensSpace(15, 4)
    t = d_invariants(y)
    for g in enumerate_forms(FormConstraints(2, 15, 1)):
        off = check_form(g, t).obstructed
        on = check_form(g, t, require_conjugation_symmetry=True).obstructed
        assert on or not off


def test_slicing_7_4():
    rep = slicing_obstruction(SliceQuery(lookup_knot("7_4"), 0, 1))
    assert rep.obstructed
    assert rep.determinants_tried == [15]


def test_rank0_cases():
    unknot = record_for_two_bridge(TwoBridgeKnot(1, 0), name="unknot")
    rep = slicing_obstruction(SliceQuery(unknot, 0, 0))
    assert not rep.obstructed
    rep = slicing_obstruction(SliceQuery(record_for_two_bridge(TwoBridgeKnot(9, 2)), 0, 0))
    assert rep.obstructed


def test_index_gt1_forms_unchecked_by_default():
    rec = record_for_two_bridge(TwoBridgeKnot(45, 2))
    rep = slicing_obstruction(SliceQuery(rec, 1, 0))
    assert not rep.obstructed
    assert any("note" in f for f in rep.forms)
