"""Linear plumbing lattices, embeddings into Z^m and the Donaldson-style
obstruction for the K_n family.

L_n is the plumbing P(4, ..., 4) with 2n vertices (its boundary is the
branched double cover of K_n).  Its dual plumbing, bounded by the reversed
cover, is P(2, 2, 3, 2, 3, ..., 3, 2, 2) with 2n - 1 weights equal to 3
(4n + 1 vertices).  It has a full-support embedding into Z^(6n+1) with
orthogonal complement L_n, but that is not the only embedding class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional
from . import intmat as im
from .lattice import GramMatrix, as_gram, canonical_form, lll, short_vectors


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PlumbingSpec:
    weights: tuple

    def __post_init__(self):
        w = tuple(int(a) for a in self.weights)
        if not w:
            raise ValueError("a plumbing needs at least one vertex")
        object.__setattr__(self, "weights", w)


def plumbing_gram(s) -> GramMatrix:
    w = s.weights if isinstance(s, PlumbingSpec) else tuple(s)
    m = len(w)
    out = im.zeros(m, m)
    for i, a in enumerate(w):
        out[i][i] = a
        if i + 1 < m:
            out[i][i + 1] = out[i + 1][i] = 1
    return GramMatrix(out)


def ln_spec(n: int) -> PlumbingSpec:
    if n < 1:
        raise ValueError("n must be at least 1")
    return PlumbingSpec((4,) * (2 * n))


def dual_ln_spec(n: int) -> PlumbingSpec:
    """P(2, 2, 3, 2, 3, ..., 3, 2, 2) with 2n - 1 threes."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return PlumbingSpec((2,) + (2, 3) * (2 * n - 1) + (2, 2))


def dual_ln_ambient_rank(n: int) -> int:
    return 6 * n + 1


def literal_dual_spec(n: int) -> PlumbingSpec:
    """The 2n + 3 vertex reading (n threes); agrees with ``dual_ln_spec`` only at n = 1."""
    return PlumbingSpec((2,) + (2, 3) * n + (2, 2))


@dataclass(frozen=True)
class ZnEmbedding:
    m: int
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(tuple(int(x) for x in v) for v in self.vectors)
        if any(len(v) != self.m for v in vecs):
            raise ValueError("vector length differs from ambient rank")
        object.__setattr__(self, "vectors", vecs)

    def gram(self) -> GramMatrix:
        return GramMatrix([[im.dot(u, v) for v in self.vectors] for u in self.vectors])

    def to_json(self):
        return [list(v) for v in self.vectors]


def canonical_embedding(vectors, m) -> ZnEmbedding:
    """Normal form under signed permutations of Z^m: each coordinate column
    gets its first nonzero entry positive, then columns are sorted."""
    cols = []
    for j in range(m):
        col = [v[j] for v in vectors]
        first = next((x for x in col if x), 0)
        if first < 0:
            col = [-x for x in col]
        cols.append(tuple(col))
    cols.sort(reverse=True)
    rows = [tuple(c[i] for c in cols) for i in range(len(vectors))]
    return ZnEmbedding(m, tuple(rows))


def _square_partitions(r, max_part=None):
    """Nonincreasing tuples of positive integers whose squares sum to r."""
    if r == 0:
        yield ()
        return
    top = int(r ** 0.5)
    while (top + 1) ** 2 <= r:
        top += 1
    if max_part is not None:
        top = min(top, max_part)
    for a in range(top, 0, -1):
        for rest in _square_partitions(r - a * a, a):
            yield (a,) + rest


def _vectors_on(coords, budget):
    """All integer vectors supported in ``coords`` with squared norm <= budget,
    as dicts coordinate -> value."""
    out = []

    def rec(i, left, cur):
        if i == len(coords):
            out.append(dict(cur))
            return
        rec(i + 1, left, cur)
        a = 1
        while a * a <= left:
            for s in (a, -a):
                cur[coords[i]] = s
                rec(i + 1, left - a * a, cur)
                del cur[coords[i]]
            a += 1

    rec(0, budget, {})
    return out


def embed_in_zn(q, m: int, max_nodes: int = 2_000_000):
    """All embeddings of the lattice with Gram ``q`` into Z^m, one per orbit of
    signed coordinate permutations.

    Orderly backtracking: coordinates not yet touched are interchangeable,
    so a new vector uses fresh coordinates in order, with positive
    nonincreasing values.  Results are canonicalised and deduplicated.
    """
    q = as_gram(q)
    n = q.rank
    found = {}
    nodes = [0]
    images = []

    def rec(k, used):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise SearchBudgetExceeded(f"embedding search exceeded {max_nodes} nodes")
        if k == n:
            emb = canonical_embedding([[v.get(j, 0) for j in range(m)] for v in images], m)
            found.setdefault(emb.vectors, emb)
            return
        target = q[k, k]
        coords = list(range(used))
        for part in _vectors_on(coords, target):
            if any(sum(val * prev.get(j, 0) for j, val in part.items()) != q[k, i]
                   for i, prev in enumerate(images)):
                continue
            rest = target - sum(v * v for v in part.values())
            for fresh in _square_partitions(rest):
                if used + len(fresh) > m:
                    continue
                vec = dict(part)
                for t, val in enumerate(fresh):
                    vec[used + t] = val
                images.append(vec)
                rec(k + 1, used + len(fresh))
                images.pop()

    rec(0, 0)
    return [found[key] for key in sorted(found)]


def orth_complement(e: ZnEmbedding) -> GramMatrix:
    """Gram matrix of the full orthogonal complement of the image in Z^m, LLL-reduced."""
    k = im.kernel_basis([list(v) for v in e.vectors])
    if not k or not k[0]:
        raise ValueError("embedding has full rank; complement is zero")
    cols = im.transpose(k)
    return GramMatrix(lll([[im.dot(u, v) for v in cols] for u in cols])[0])


def _pairing_surjective(q, xs):
    rows = [im.matvec(q.entries, x) for x in xs]
    return im.image_is_everything(rows)


@dataclass(frozen=True)
class HalfIntegerSublattice:
    xs: tuple
    ys: tuple

    @property
    def rank(self):
        return 2 * len(self.xs)

    def validate(self, q):
        q = as_gram(q)
        for i, x in enumerate(self.xs):
            for j, other in enumerate(self.xs):
                if q.pair(x, other) != (2 if i == j else 0):
                    raise ValueError("x vectors are not orthogonal roots")
            for j, y in enumerate(self.ys):
                if q.pair(x, y) != (1 if i == j else 0):
                    raise ValueError("x . y is not the identity")


def half_integer_sublattices(q, max_nodes: int = 5_000_000):
    """Largest orthogonal sets {x_i} of square-2 vectors (up to sign) whose
    pairing with the lattice is onto Z^r, with explicit y_i certificates."""
    q = as_gram(q)
    n = q.rank
    roots = [v for v in short_vectors(q, 2)
             if q.norm(v) == 2 and next(x for x in v if x) > 0]
    best = []
    nodes = [0]

    def rec(start, chosen):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise SearchBudgetExceeded(f"root search exceeded {max_nodes} nodes")
        if len(chosen) > len(best):
            best[:] = list(chosen)
        if 2 * (len(chosen) + 1) > n:
            return
        for idx in range(start, len(roots)):
            x = roots[idx]
            if any(q.pair(x, c) for c in chosen):
                continue
            # a non-surjective pairing stays non-surjective for supersets
            if not _pairing_surjective(q, chosen + [x]):
                continue
            chosen.append(x)
            rec(idx + 1, chosen)
            chosen.pop()

    rec(0, [])
    return _certify(q, best)


def _certify(q, xs):
    """Complete {x_i} with y_i satisfying x_i . y_j = delta_ij.

    With U A V = [I 0] for the pairing rows A, the columns of V [U; 0] are
    the y_j.  The resulting Gram matrix has determinant det(2M - I), which is
    odd, so x and y are automatically independent.
    """
    r = len(xs)
    if r == 0:
        return HalfIntegerSublattice((), ())
    rows = [im.matvec(q.entries, x) for x in xs]
    u, _, v = im.smith(rows)
    n = q.rank
    ys = []
    for j in range(r):
        col = [u[i][j] for i in range(r)] + [0] * (n - r)
        ys.append(tuple(im.matvec(v, col)))
    return HalfIntegerSublattice(tuple(tuple(x) for x in xs), tuple(ys))


def max_half_integer_rank(q) -> int:
    return half_integer_sublattices(q).rank


def ln_plus_zk(n: int, k: int) -> GramMatrix:
    g = plumbing_gram(ln_spec(n))
    return g.direct_sum(GramMatrix(im.identity(k))) if k else g


@dataclass(frozen=True)
class EmbeddingClass:
    embedding: ZnEmbedding
    support: int
    complement: Optional[GramMatrix]

    @property
    def complement_rank(self):
        return 0 if self.complement is None else self.complement.rank

    def with_unit_summand(self, k):
        """complement + Z^k; None when both are zero."""
        if k == 0:
            return self.complement
        unit = GramMatrix(im.identity(k))
        return unit if self.complement is None else self.complement.direct_sum(unit)


def dual_embedding_classes(n: int, m: int = None):
    """Every embedding class of the dual plumbing into Z^m, with the
    orthogonal complement taken inside the coordinates it touches.

    The default m is the sum of the weights, which no embedding can exceed
    in support, so the list covers every ambient rank.
    """
    spec = dual_ln_spec(n)
    if m is None:
        m = sum(spec.weights)
    out = []
    for e in embed_in_zn(plumbing_gram(spec), m):
        used = [j for j in range(m) if any(v[j] for v in e.vectors)]
        local = ZnEmbedding(len(used), tuple(tuple(v[j] for j in used) for v in e.vectors))
        comp = orth_complement(local) if len(used) > len(e.vectors) else None
        out.append(EmbeddingClass(e, len(used), comp))
    return out


@dataclass
class DonaldsonReport:
    n: int
    r: int
    k_budget: int
    classes: list = field(default_factory=list)
    obstructed: bool = False
    reason: str = ""

    @property
    def standard_class_found(self):
        return any(c["complement_is_ln"] for c in self.classes)

    def to_json(self):
        return {
            "n": self.n,
            "r": self.r,
            "k_budget": self.k_budget,
            "dual_plumbing": list(dual_ln_spec(self.n).weights),
            "embedding_classes": self.classes,
            "conclusion": "obstructed" if self.obstructed else "not obstructed",
            "reason": self.reason,
        }


def donaldson_slicing_obstruction(n: int, r: int, k_budget: int = 6) -> DonaldsonReport:
    """Decide whether K_n can be sliced with n negative and at most r - n
    positive crossing changes, by the Donaldson argument.

    A filling X of the branched cover with b_2 = 2r' glues to the dual
    plumbing to give a closed definite manifold, so the dual plumbing embeds
    in some Z^m with H_2(X) of finite index in the complement C + Z^k, where
    C is the complement inside the coordinates the embedding touches and
    k = 2r' - rank C.  Every embedding class is examined.  The knot is
    obstructed when, for every class and every r' in [n, r], C + Z^k has no
    half-integer-type sublattice of rank 2r'.  Any k beyond ``k_budget``
    leaves the answer uncertified ("not obstructed").
    """
    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    report = DonaldsonReport(n, r, k_budget)
    if r < n:
        report.obstructed = True
        report.reason = "r < n: the n negative changes alone exceed the budget"
        return report
    ln = canonical_form(plumbing_gram(ln_spec(n)))[0]
    ok = True
    for cls in dual_embedding_classes(n):
        entry = {
            "vectors": [list(v[:cls.support]) for v in cls.embedding.vectors],
            "support": cls.support,
            "complement": None if cls.complement is None else cls.complement.to_json(),
            "complement_is_ln": cls.complement is not None
            and canonical_form(cls.complement)[0] == ln,
            "max_half_integer_rank": {},
        }
        for rr in range(n, r + 1):
            k = 2 * rr - cls.complement_rank
            if k < 0:
                continue
            if k > k_budget:
                ok = False
                entry["over_budget"] = k
                continue
            lat = cls.with_unit_summand(k)
            mr = 0 if lat is None else max_half_integer_rank(lat)
            entry["max_half_integer_rank"][str(k)] = mr
            ok &= mr < 2 * rr
        report.classes.append(entry)
    report.obstructed = ok
    report.reason = ("no embedding class leaves room for a half-integer-type filling" if ok
                     else "some class or budget left a filling possible")
    return report
