from itertools import combinations, permutations, product

import pytest
from hypothesis import given, settings, strategies as st

from slicenum import intmat as im
from slicenum.embed import (
    PlumbingSpec,
    ZnEmbedding,
    donaldson_slicing_obstruction,
    dual_embedding_classes,
    dual_ln_ambient_rank,
    dual_ln_spec,
    embed_in_zn,
    half_integer_sublattices,
    literal_dual_spec,
    ln_plus_zk,
    ln_spec,
    max_half_integer_rank,
    orth_complement,
    plumbing_gram,
)
from slicenum.knots import kn_determinant
from slicenum.lattice import GramMatrix, canonical_form, determinant

from strategies import half_integer_forms, unimodular


def brute_embedding_classes(gram, m, box=2):
    """Embeddings with entries in [-box, box], up to signed coordinate permutations."""
    n = len(gram)
    cands = {}
    for v in product(range(-box, box + 1), repeat=m):
        cands.setdefault(sum(x * x for x in v), []).append(v)
    seen = set()

    def canon(vecs):
        best = None
        for perm in permutations(range(m)):
            for signs in product((1, -1), repeat=m):
                key = tuple(tuple(signs[j] * v[perm[j]] for j in range(m)) for v in vecs)
                if best is None or key < best:
                    best = key
        return best

    def rec(vecs):
        k = len(vecs)
        if k == n:
            seen.add(canon(vecs))
            return
        for v in cands.get(gram[k][k], []):
            if all(im.dot(v, vecs[i]) == gram[k][i] for i in range(k)):
                rec(vecs + [v])

    rec([])
    return seen


def test_plumbing_examples():
    assert plumbing_gram(PlumbingSpec((4, 4))).entries == ((4, 1), (1, 4))
    assert plumbing_gram(PlumbingSpec((2,))).entries == ((2,),)
    g = plumbing_gram(PlumbingSpec((2, 2, 3, 2, 2)))
    assert g[2, 2] == 3 and g[1, 2] == 1 and g[0, 2] == 0
    with pytest.raises(ValueError):
        PlumbingSpec(())


def test_trivial_embeddings():
    assert len(embed_in_zn(GramMatrix(((1,),)), 1)) == 1
    assert embed_in_zn(GramMatrix(((3,),)), 2) == []
    assert len(embed_in_zn(GramMatrix(((3,),)), 3)) == 1


def test_complement_of_diagonal():
    comp = orth_complement(ZnEmbedding(2, ((1, 1),)))
    assert comp.entries == ((2,),)
    with pytest.raises(ValueError):
        orth_complement(ZnEmbedding(1, ((1,),)))


@pytest.mark.parametrize("weights,m", [
    ((2,), 2), ((2,), 3), ((2, 2), 3), ((3,), 3), ((2, 3), 3), ((3, 2), 3), ((2, 2, 2), 3),
    ((1, 2), 2), ((5,), 3), ((2, 2), 2),
])
def test_embedding_classes_against_brute_force(weights, m):
    g = plumbing_gram(PlumbingSpec(weights))
    got = embed_in_zn(g, m)
    for e in got:
        assert e.gram() == g
    assert len(got) == len(brute_embedding_classes([list(r) for r in g.entries], m))


def test_dual_plumbing_determinant():
    for n in range(1, 5):
        g = plumbing_gram(dual_ln_spec(n))
        assert determinant(g) == kn_determinant(n)
        assert g.rank == 4 * n + 1
        assert dual_ln_ambient_rank(n) == 6 * n + 1
    # the n-threes reading only has the right determinant for n = 1
    assert determinant(plumbing_gram(literal_dual_spec(1))) == 15
    for n in (2, 3):
        assert determinant(plumbing_gram(literal_dual_spec(n))) != kn_determinant(n)


def test_full_support_class_has_ln_complement():
    for n in (1, 2):
        m = dual_ln_ambient_rank(n)
        full = [c for c in dual_embedding_classes(n, m) if c.support == m]
        assert len(full) == 1
        ln = canonical_form(plumbing_gram(ln_spec(n)))[0]
        assert canonical_form(full[0].complement)[0] == ln


def test_embedding_class_counts():
    assert len(dual_embedding_classes(1, 7)) == 3
    assert len(dual_embedding_classes(2, 13)) == 8


def test_complements_are_root_free():
    for c in dual_embedding_classes(2, 13):
        if c.complement is not None:
            assert max_half_integer_rank(c.complement) == 0


def test_half_integer_rank_examples():
    assert max_half_integer_rank(plumbing_gram(ln_spec(1))) == 0
    assert max_half_integer_rank(GramMatrix(im.identity(2))) == 2
    assert max_half_integer_rank(ln_plus_zk(1, 2)) == 2


def _brute_rank(q):
    """Largest orthogonal root set whose pairing is onto, via gcd of maximal minors."""
    from math import gcd

    n = q.rank
    roots = [v for v in product((-1, 0, 1), repeat=n)
             if q.norm(v) == 2 and next(x for x in v if x) > 0]
    best = 0
    for r in range(1, n // 2 + 1):
        for xs in combinations(roots, r):
            if any(q.pair(a, b) for a, b in combinations(xs, 2)):
                continue
            rows = [im.matvec(q.entries, x) for x in xs]
            g = 0
            for cols in combinations(range(n), r):
                g = gcd(g, im.det([[row[c] for c in cols] for row in rows]))
            if g == 1:
                best = 2 * r
    return best


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_rank_of_zk_against_brute_force(k):
    q = GramMatrix(im.identity(k))
    assert max_half_integer_rank(q) == _brute_rank(q) == 2 * (k // 2)


def test_lk_plus_zk_rank_bound():
    for n in (1, 2):
        for k in range(0, 5):
            assert max_half_integer_rank(ln_plus_zk(n, k)) == 2 * (k // 2)


@given(half_integer_forms(1, 2), st.data())
@settings(max_examples=30)
def test_half_integer_forms_reach_full_rank(rx, data):
    r, _, form = rx
    p = data.draw(unimodular(2 * r))
    disguised = form.transform(p)
    sub = half_integer_sublattices(disguised)
    assert sub.rank == 2 * r
    sub.validate(disguised)


@given(half_integer_forms(1, 2))
@settings(max_examples=20)
def test_rank_grows_by_at_most_two(rx):
    _, _, form = rx
    a = max_half_integer_rank(form)
    b = max_half_integer_rank(form.direct_sum(GramMatrix(((1,),))))
    assert a <= b <= a + 2


def test_donaldson_small_n():
    rep = donaldson_slicing_obstruction(1, 1)
    assert rep.obstructed
    assert rep.standard_class_found
    assert donaldson_slicing_obstruction(2, 1).obstructed
    doc = rep.to_json()
    assert doc["conclusion"] == "obstructed"
    assert len(doc["embedding_classes"]) == 3


def test_donaldson_budget_uncertified():
    rep = donaldson_slicing_obstruction(1, 4, k_budget=2)
    assert not rep.obstructed
    assert any("over_budget" in c for c in rep.classes)
