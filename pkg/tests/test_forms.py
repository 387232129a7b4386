import pytest
from hypothesis import given, settings, strategies as st

from slicenum import intmat as im
from slicenum.forms import (
    FormConstraints,
    admissible_determinants,
    brute_force_forms,
    enumerate_forms,
    even_y_count,
    gl_classes,
)
from slicenum.lattice import (
    canonical_form,
    detect_half_integer_type,
    determinant,
    mod4_congruence_holds,
)


@pytest.mark.parametrize("det,expect", [(15, [15]), (45, [5, 45]), (1, [1]), (225, [1, 9, 25, 225])])
def test_admissible_determinants(det, expect):
    assert admissible_determinants(det) == expect


@pytest.mark.parametrize("bad", [0, -3, 4])
def test_admissible_determinants_rejects(bad):
    with pytest.raises(ValueError):
        admissible_determinants(bad)


def test_constraints_validation():
    with pytest.raises(ValueError):
        FormConstraints(0, 15, 0)
    with pytest.raises(ValueError):
        FormConstraints(1, 16, 0)
    with pytest.raises(ValueError):
        FormConstraints(1, 15, 2)


def test_infeasible_mod4_is_empty_with_reason():
    c = FormConstraints(1, 15, 0)
    assert c.infeasibility() is not None
    assert enumerate_forms(c) == []


def test_rank2_det15():
    forms = enumerate_forms(FormConstraints(1, 15, 1))
    assert [f.entries for f in forms] == [((2, 1), (1, 8))]


def test_rank4_det15_matches_brute_force():
    c = FormConstraints(2, 15, 1)
    got = enumerate_forms(c)
    assert got
    assert [g.entries for g in got] == [g.entries for g in brute_force_forms(c)]


def test_gl_classes_small_counts():
    # binary forms of det 3: [[1,0],[0,3]] and [[2,1],[1,2]]
    assert len(gl_classes(2, 3)) == 2
    assert len(gl_classes(2, 1)) == 1


@settings(max_examples=40)
@given(st.integers(1, 2), st.integers(0, 30).map(lambda k: 2 * k + 1), st.data())
def test_emitted_forms_satisfy_invariants(r, det, data):
    n_even = data.draw(st.integers(0, r))
    c = FormConstraints(r, det, n_even)
    forms = enumerate_forms(c)
    keys = [canonical_form(g)[0].entries for g in forms]
    assert len(set(keys)) == len(keys)
    assert keys == sorted(keys)
    for g in forms:
        assert determinant(g) == det
        cert = detect_half_integer_type(g, n_even=n_even)
        assert cert is not None
        assert mod4_congruence_holds(g, cert)


def test_rank6_det51_forms():
    forms = enumerate_forms(FormConstraints(3, 51, 3))
    assert len(forms) == 4
    for g in forms:
        assert determinant(g) == 51
        assert detect_half_integer_type(g, n_even=3) is not None


def test_even_y_count():
    assert even_y_count([[15]]) == 1  # m = 8
    assert even_y_count([[1]]) == 0   # m = 1
