from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, strategies as st

from slicenum.knots import (
    KnotRecord,
    KnotTableError,
    SliceQuery,
    TwoBridgeKnot,
    branched_double_cover,
    builtin_table,
    determinant,
    floor_sum_signature,
    ingest_table,
    kn_determinant,
    kn_family,
    lookup_knot,
    parse_table,
    raw_signature,
    record_for_two_bridge,
    seifert_signature,
    signature,
)
from slicenum.lens import negative_continued_fraction, recompose

HEADER = "name,determinant,signature,two_bridge_p,two_bridge_q,slice_genus"


def evaluate(cf):
    x = Fraction(cf[-1])
    for a in reversed(cf[:-1]):
        x = a - 1 / x
    return x


@pytest.mark.parametrize("p,q,cf", [(15, 4, [4, 4]), (2, 1, [2])])
def test_continued_fraction_examples(p, q, cf):
    assert negative_continued_fraction(p, q) == cf


def test_continued_fraction_51_35():
    cf = negative_continued_fraction(51, 35)
    assert evaluate(cf) == Fraction(51, 35)
    assert recompose(cf) == (51, 35)


@given(st.integers(2, 10000), st.data())
def test_continued_fraction_recomposes(p, data):
    q = data.draw(st.integers(1, p - 1))
    assume(gcd(p, q) == 1)
    cf = negative_continued_fraction(p, q)
    assert all(a >= 2 for a in cf)
    assert evaluate(cf) == Fraction(p, q)
    assert recompose(cf) == (p, q)


def test_continued_fraction_rejects():
    with pytest.raises(ValueError):
        negative_continued_fraction(6, 4)
    with pytest.raises(ValueError):
        negative_continued_fraction(5, 5)


def test_kn_family():
    assert kn_family(1) == TwoBridgeKnot(15, 4)
    assert kn_family(2).p == 209
    assert kn_family(3).p == 2911
    for n in range(1, 7):
        assert kn_determinant(n) == kn_family(n).p
        assert negative_continued_fraction(kn_family(n).p, kn_family(n).q) in ([4] * (2 * n),) or \
            recompose([4] * (2 * n))[0] == kn_family(n).p
    with pytest.raises(ValueError):
        kn_family(0)


def test_kn_recurrence_oracle():
    p = [1, 4]
    for _ in range(12):
        p.append(4 * p[-1] - p[-2])
    for n in range(1, 7):
        assert kn_determinant(n) == p[2 * n]


def test_signature_examples():
    assert signature(TwoBridgeKnot(15, 4)) == 2
    assert signature(TwoBridgeKnot(51, 35)) == 6
    for n in range(1, 5):
        assert signature(kn_family(n)) == 2 * n


def test_trefoil_handedness_convention():
    assert raw_signature(3, 1) == -2
    assert TwoBridgeKnot(3, 1).mirrored


def test_mirror_canonicalisation():
    a, b = TwoBridgeKnot(15, 11), TwoBridgeKnot(15, 4)
    assert a == b
    assert a.mirrored != b.mirrored
    assert TwoBridgeKnot(51, 35) == TwoBridgeKnot(51, 16)


def test_kn_signature_against_seifert_oracle():
    for n in (1, 2):
        k = kn_family(n)
        assert abs(seifert_signature(k.p, k.q)) == 2 * n


@given(st.integers(1, 75).map(lambda k: 2 * k + 1), st.data())
def test_signature_oracles_agree(p, data):
    q = data.draw(st.integers(1, p - 1))
    assume(gcd(p, q) == 1)
    s = raw_signature(p, q)
    assert s == seifert_signature(p, q) == floor_sum_signature(p, q)


def test_two_bridge_rejects():
    with pytest.raises(ValueError):
        TwoBridgeKnot(2, 1)
    with pytest.raises(ValueError):
        TwoBridgeKnot(9, 3)


def test_determinant_and_cover():
    k = TwoBridgeKnot(15, 4)
    assert determinant(k) == 15
    y = branched_double_cover(k)
    assert (y.p, y.q) == (15, 4)
    assert determinant(TwoBridgeKnot(51, 35)) == 51
    assert determinant(kn_family(2)) == 209
    y = branched_double_cover(TwoBridgeKnot(51, 35))
    assert y.p == 51 and y.q in (16, 35)


@given(st.integers(0, 200).map(lambda k: 2 * k + 1), st.data())
def test_murasugi_for_constructed_knots(p, data):
    q = 0 if p == 1 else data.draw(st.integers(1, p - 1))
    assume(gcd(p, q) == 1)
    k = TwoBridgeKnot(p, q)
    rec = record_for_two_bridge(k)
    assert (rec.determinant - rec.signature - 1) % 4 == 0
    assert branched_double_cover(k).order == determinant(k)


def test_record_rejects_murasugi_violation():
    with pytest.raises(ValueError):
        KnotRecord("bad", 15, 0)


def test_ingest_row(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text(HEADER + "\n7_4,15,2,15,4,1\n")
    (rec,) = ingest_table(f)
    assert rec.two_bridge == TwoBridgeKnot(15, 4)
    assert rec.slice_genus == 1


def test_ingest_rejects_bad_rows_with_row_numbers(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text(HEADER + "\n7_4,15,2,15,4,1\nbad,15,0,,,\n")
    with pytest.raises(KnotTableError, match="row 3"):
        ingest_table(f)


def test_ingest_empty_file(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("")
    assert ingest_table(f) == []


def test_ingest_header_required():
    with pytest.raises(KnotTableError):
        parse_table(["a,b\n", "1,2\n"])


def test_builtin_table_satisfies_murasugi():
    recs = builtin_table()
    assert {r.name for r in recs} >= {"unknot", "7_4", "11a365"}
    for r in recs:
        assert (r.determinant - r.signature - 1) % 4 == 0
    assert lookup_knot("K2").two_bridge == kn_family(2)
    with pytest.raises(KeyError):
        lookup_knot("nope")


def test_slice_query():
    rec = lookup_knot("7_4")
    assert SliceQuery(rec, 0, 1).r == 1
    with pytest.raises(ValueError):
        SliceQuery(rec, 0, 2)
