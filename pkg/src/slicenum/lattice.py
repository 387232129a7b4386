"""Positive-definite integer lattices given by Gram matrices.

Everything is exact: Python ints for entries, Fractions for the
Gram-Schmidt data used by enumeration.  The half-integer surgery machinery
lives here as well: a form of rank 2r is of half-integer surgery type when it
has a basis x_1..x_r, y_1..y_r with x_i.x_j = 2 delta_ij and x_i.y_j = delta_ij.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import floor, ceil

from . import intmat as im


class LatticeError(ValueError):
    """Raised for malformed or out-of-contract lattice input."""


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        n = len(rows)
        if n == 0:
            raise LatticeError("rank must be at least 1")
        if any(len(row) != n for row in rows):
            raise LatticeError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise LatticeError(f"Gram matrix not symmetric at ({i}, {j})")
        object.__setattr__(self, "entries", rows)

    @property
    def rank(self) -> int:
        return len(self.entries)

    def rows(self):
        return [list(r) for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def diagonal(self):
        return [self.entries[i][i] for i in range(self.rank)]

    def pair(self, u, v) -> int:
        return im.bilinear(self.entries, u, v)

    def norm(self, v) -> int:
        return im.bilinear(self.entries, v, v)

    def transform(self, p) -> "GramMatrix":
        """Gram matrix in the basis given by the columns of ``p``."""
        return GramMatrix(im.congruence(self.entries, p))

    def direct_sum(self, other: "GramMatrix") -> "GramMatrix":
        n, m = self.rank, other.rank
        out = im.zeros(n + m, n + m)
        for i in range(n):
            out[i][:n] = self.entries[i]
        for i in range(m):
            out[n + i][n:] = other.entries[i]
        return GramMatrix(out)

    def to_json(self):
        return [[str(x) for x in row] for row in self.entries]

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls([[int(x) for x in row] for row in data])

    def __repr__(self):
        return f"GramMatrix({[list(r) for r in self.entries]})"


def as_gram(q) -> GramMatrix:
    return q if isinstance(q, GramMatrix) else GramMatrix(q)


def identity_form(n) -> GramMatrix:
    return GramMatrix(im.identity(n))


@dataclass(frozen=True)
class UnimodularMap:
    matrix: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise LatticeError("unimodular map must be a nonempty square matrix")
        if abs(im.det(rows)) != 1:
            raise LatticeError("matrix is not unimodular")
        object.__setattr__(self, "matrix", rows)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def rows(self):
        return [list(r) for r in self.matrix]


@dataclass(frozen=True)
class HalfIntBasis:
    """Certificate that a form is of half-integer surgery type.

    The columns of ``basis_change`` are x_1..x_r, y_1..y_r; ``y_parities[i]``
    is 1 when y_i has odd square.
    """

    r: int
    basis_change: tuple
    y_parities: tuple

    def __post_init__(self):
        bc = tuple(tuple(int(x) for x in row) for row in self.basis_change)
        object.__setattr__(self, "basis_change", bc)
        object.__setattr__(self, "y_parities", tuple(int(x) % 2 for x in self.y_parities))
        if self.r < 1 or len(bc) != 2 * self.r or len(self.y_parities) != self.r:
            raise LatticeError("inconsistent certificate dimensions")
        if abs(im.det(bc)) != 1:
            raise LatticeError("basis change is not unimodular")

    @property
    def odd_count(self) -> int:
        return sum(self.y_parities)

    @property
    def even_count(self) -> int:
        return self.r - self.odd_count

    def normal_form(self, q) -> GramMatrix:
        return as_gram(q).transform(self.basis_change)

    def y_squares(self, q):
        g = self.normal_form(q)
        return [g[self.r + i, self.r + i] for i in range(self.r)]

    def validate(self, q) -> None:
        q = as_gram(q)
        if q.rank != 2 * self.r:
            raise LatticeError("certificate rank does not match form")
        g = self.normal_form(q)
        r = self.r
        for i in range(r):
            for j in range(r):
                if g[i, j] != 2 * (i == j) or g[i, r + j] != (i == j):
                    raise LatticeError("basis is not of half-integer surgery shape")
        if tuple(m % 2 for m in self.y_squares(q)) != self.y_parities:
            raise LatticeError("recorded parities do not match y squares")

    def to_json(self):
        return {
            "r": self.r,
            "basis_change": [[str(x) for x in row] for row in self.basis_change],
            "y_parities": ["odd" if p else "even" for p in self.y_parities],
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            r=int(data["r"]),
            basis_change=[[int(x) for x in row] for row in data["basis_change"]],
            y_parities=[1 if p == "odd" else 0 for p in data["y_parities"]],
        )


# ---------------------------------------------------------------------------
# basic invariants

def determinant(q) -> int:
    return im.det(as_gram(q).entries)


def is_positive_definite(q) -> bool:
    return all(m > 0 for m in im.leading_minors(as_gram(q).entries))


def _require_pd(q):
    q = as_gram(q)
    if not is_positive_definite(q):
        raise LatticeError("form is not positive definite")
    return q


# ---------------------------------------------------------------------------
# enumeration

def iter_ellipsoid(q, bound, center=None, ldl=None):
    """Yield ``(x, norm)`` for all integer x with ``(x - c)^T Q (x - c) <= bound``.

    Fincke-Pohst with exact rational arithmetic.  ``q`` must be positive
    definite; it may have Fraction entries.
    """
    rows = q.entries if isinstance(q, GramMatrix) else q
    n = len(rows)
    d, mu = ldl if ldl is not None else im.ldl(rows)
    t = [Fraction(0)] * n if center is None else [Fraction(c) for c in center]
    bound = Fraction(bound)
    x = [0] * n

    def rec(i, remaining):
        c = -t[i]
        mi = mu[i]
        for j in range(i + 1, n):
            if mi[j]:
                c += mi[j] * (x[j] - t[j])
        s = remaining / d[i]
        if s < 0:
            return
        r = im.floor_sqrt(s)
        lo = floor(-c) - r - 1
        hi = ceil(-c) + r + 1
        for xi in range(lo, hi + 1):
            y = xi + c
            val = d[i] * y * y
            if val <= remaining:
                x[i] = xi
                if i == 0:
                    yield list(x), bound - remaining + val
                else:
                    yield from rec(i - 1, remaining - val)
        x[i] = 0

    if n == 0:
        yield [], Fraction(0)
        return
    yield from rec(n - 1, bound)


def short_vectors(q, bound):
    """All nonzero v with v^T Q v <= bound, sorted by (norm, v); v and -v both listed."""
    q = _require_pd(q)
    out = []
    for v, nv in iter_ellipsoid(q, bound):
        if any(v):
            out.append((int(nv), tuple(v)))
    out.sort()
    return [list(v) for _, v in out]


def vectors_of_norm(q, value):
    q = as_gram(q)
    return [v for v in short_vectors(q, value) if q.norm(v) == value]


# ---------------------------------------------------------------------------
# reduction

def lll(q, delta=Fraction(3, 4)):
    """Exact LLL on a Gram matrix.  Returns (reduced Gram rows, transform columns)."""
    g = [list(r) for r in as_gram(q).entries]
    n = len(g)
    b = im.identity(n)  # columns are basis vectors; b[:, k] stored as row k of bt
    bt = [row[:] for row in b]

    def gram_of(i, j):
        return im.bilinear(g, bt[i], bt[j])

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bstar = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = Fraction(gram_of(i, j))
                for k in range(j):
                    s -= mu[j][k] * mu[i][k] * bstar[k]
                mu[i][j] = s / bstar[j]
            s = Fraction(gram_of(i, i))
            for k in range(i):
                s -= mu[i][k] * mu[i][k] * bstar[k]
            bstar[i] = s
        return mu, bstar

    mu, bstar = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            c = round(mu[k][j])
            if c:
                bt[k] = [x - c * y for x, y in zip(bt[k], bt[j])]
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            bt[k], bt[k - 1] = bt[k - 1], bt[k]
            mu, bstar = gso()
            k = max(k - 1, 1)
    p = im.transpose(bt)
    return im.congruence(g, p), p


def _quotient_step(m, w):
    """Given quotient map M and the image w = M v (gcd 1), return the next quotient map."""
    u, _, _ = im.smith([[x] for x in w])
    return im.matmul(u, m)[1:]


def canonical_form(q):
    """Canonical representative of the GL(n, Z)-congruence class of ``q``.

    The basis is chosen to lexicographically minimise the sequence
    (b_k.b_k, -b_k.b_0, ..., -b_k.b_{k-1}) for k = 0, 1, ...; signs are
    normalised greedily, so the result has nondecreasing diagonal and the
    first nonzero entry linking two blocks positive.  Returns (Gram, P).
    """
    q = _require_pd(q)
    n = q.rank
    rows = q.entries
    red, _ = lll(q)
    bound = max(red[i][i] for i in range(n))

    def candidates_upto(b):
        vs = []
        for v, nv in iter_ellipsoid(q, b):
            if not any(v):
                continue
            first = next(x for x in v if x)
            if first > 0:
                vs.append((int(nv), tuple(v)))
        vs.sort()
        return [(nv, v, tuple(im.matvec(rows, v))) for nv, v in vs]

    pool = candidates_upto(bound)
    best = {"key": None, "basis": None, "path": None}
    jump = {"to": None}
    autos = []  # automorphisms found from leaves with equal keys

    def level_candidates(quot):
        nonlocal pool, bound
        while True:
            found_norm = None
            cands = []
            for nv, v, qv in pool:
                if found_norm is not None and nv > found_norm:
                    break
                w = [sum(a * b for a, b in zip(row, v)) for row in quot]
                if not im.primitive(w):
                    continue
                found_norm = nv
                cands.append((nv, v, qv, w))
            if cands:
                return cands
            bound *= 2
            pool = candidates_upto(bound)

    def chunk_for(qv, nv, basis, comp):
        entries = []
        vsign = None
        flips = {}
        for i, b in enumerate(basis):
            ip = sum(a * c for a, c in zip(qv, b))
            if ip == 0:
                entries.append(0)
                continue
            c = comp[i]
            if vsign is None:
                vsign = 1 if ip > 0 else -1
                flips[c] = 1
                entries.append(abs(ip))
            elif c in flips:
                entries.append(vsign * ip * flips[c])
            else:
                flips[c] = 1 if vsign * ip > 0 else -1
                entries.append(abs(ip))
        key = (nv,) + tuple(-e for e in entries)
        return key, vsign or 1, flips

    def up_to_sign(v):
        first = next(x for x in v if x)
        return tuple(v) if first > 0 else tuple(-x for x in v)

    def stabilizer(basis):
        """Stored automorphisms fixing every prefix vector (or negating all of them)."""
        out = []
        for g in autos:
            imgs = [im.matvec(g, b) for b in basis]
            if all(x == b for x, b in zip(imgs, basis)):
                out.append(g)
            elif all(x == [-y for y in b] for x, b in zip(imgs, basis)):
                out.append([[-y for y in row] for row in g])
        return out

    def record_leaf(basis, key, path):
        if best["key"] is None or key < best["key"]:
            best["key"] = list(key)
            best["basis"] = [list(b) for b in basis]
            best["path"] = list(path)
        elif key == best["key"]:
            # maps the best leaf basis onto this one; the subtree where the
            # two paths part is then a copy of one already searched
            b1 = im.transpose(best["basis"])
            b2 = im.transpose(basis)
            autos.append(im.matmul(b2, im.unimodular_inverse(b1)))
            split = next(i for i, (x, y) in enumerate(zip(path, best["path"])) if x != y)
            jump["to"] = split

    def search(basis, comp, quot, key, path):
        level = len(basis)
        if level == n:
            record_leaf(basis, key, path)
            return
        options = []
        for nv, v, qv, w in level_candidates(quot):
            ck, vsign, flips = chunk_for(qv, nv, basis, comp)
            options.append((ck, v, w, vsign, flips))
        top = min(o[0] for o in options)
        if best["key"] is not None and key + [top] > best["key"][: level + 1]:
            return
        explored = set()
        for ck, v, w, vsign, flips in options:
            if ck != top:
                continue
            if explored:
                # skip v when a prefix-fixing automorphism carries an explored
                # candidate onto it: the two subtrees are isomorphic
                gens = stabilizer(basis)
                if gens:
                    orbit, frontier = set(explored), list(explored)
                    while frontier:
                        x = frontier.pop()
                        for g in gens:
                            y = up_to_sign(im.matvec(g, x))
                            if y not in orbit:
                                orbit.add(y)
                                frontier.append(y)
                    explored = orbit
                    if v in orbit:
                        continue
            explored.add(v)
            newbasis = []
            newcomp = []
            for i, b in enumerate(basis):
                c = comp[i]
                if c in flips:
                    newbasis.append([-x for x in b] if flips[c] < 0 else b)
                    newcomp.append(level)
                else:
                    newbasis.append(b)
                    newcomp.append(c)
            newbasis.append([vsign * x for x in v])
            newcomp.append(level)
            newquot = _quotient_step(quot, w) if level + 1 < n else []
            search(newbasis, newcomp, newquot, key + [ck], path + [v])
            if jump["to"] is not None:
                if jump["to"] < level:
                    return
                jump["to"] = None

    search([], [], im.identity(n), [], [])
    p = im.transpose(best["basis"])
    return GramMatrix(im.congruence(rows, p)), p


def minkowski_reduce(q):
    """Return ``(canonical Gram, UnimodularMap P)`` with P^T Q P = canonical Gram.

    Two positive-definite forms are congruent exactly when their canonical
    Grams coincide.
    """
    g, p = canonical_form(q)
    return g, UnimodularMap(p)


def canonical_key(q):
    return canonical_form(q)[0].entries


def theta_counts(q, bound=None):
    """Numbers of lattice vectors of each norm up to ``bound`` (default: the
    largest diagonal entry of an LLL-reduced Gram)."""
    q = _require_pd(q)
    if bound is None:
        red, _ = lll(q)
        bound = max(red[i][i] for i in range(q.rank))
    counts = {}
    for v, nv in iter_ellipsoid(q, bound):
        if any(v):
            counts[int(nv)] = counts.get(int(nv), 0) + 1
    return tuple(sorted(counts.items()))


def isometry_invariant(q):
    q = as_gram(q)
    red, _ = lll(q)
    bound = max(red[i][i] for i in range(q.rank))
    return (q.rank, determinant(q), bound, theta_counts(q, bound))


def find_isometry(q1, q2):
    """A matrix P with P^T Q2 P = Q1 (unimodular since the determinants agree), or None.

    Backtracking over images of an LLL basis of Q1 among vectors of Q2 of
    the same norm with matching inner products.
    """
    q1, q2 = _require_pd(q1), _require_pd(q2)
    n = q1.rank
    if q2.rank != n or determinant(q1) != determinant(q2):
        return None
    red, t = lll(q1)
    top = max(red[i][i] for i in range(n))
    by_norm = {}
    for v, nv in iter_ellipsoid(q2, top):
        if any(v):
            by_norm.setdefault(int(nv), []).append((v, im.matvec(q2.entries, v)))
    images = []

    def rec(k):
        if k == n:
            return True
        for v, qv in by_norm.get(red[k][k], ()):
            if all(im.dot(qv, images[j]) == red[k][j] for j in range(k)):
                images.append(v)
                if rec(k + 1):
                    return True
                images.pop()
        return False

    if not rec(0):
        return None
    w = im.transpose(images)  # W^T Q2 W = red = T^T Q1 T
    return im.matmul(w, im.unimodular_inverse(t))


def is_isometric(q1, q2) -> bool:
    q1, q2 = as_gram(q1), as_gram(q2)
    if q1.rank != q2.rank or determinant(q1) != determinant(q2):
        return False
    return find_isometry(q1, q2) is not None


# ---------------------------------------------------------------------------
# half-integer surgery type

def lift_gl_mod2(r):
    """Lift a matrix invertible over Z/2 to an integer matrix of determinant +-1.

    A 0/1 representative that is already unimodular is returned unchanged.

    Induction on size: pick a first-row entry with odd entry and odd
    complementary minor, lift that minor so its cofactor is exactly 1, then
    correct the entry by an even amount.
    """
    r = [[x & 1 for x in row] for row in r]
    n = len(r)
    if n == 0 or any(len(row) != n for row in r):
        raise LatticeError("expected a nonempty square matrix")
    d = im.det(r)
    if d % 2 == 0:
        raise LatticeError("matrix is singular mod 2")
    if abs(d) == 1:
        return UnimodularMap(r)
    return UnimodularMap(_lift(r))


def _lift(r):
    n = len(r)
    if n == 1:
        return [[1]]
    for j in range(n):
        if r[0][j] % 2 == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in r[1:]]
        if im.det(minor) % 2:
            break
    else:  # pragma: no cover - impossible for odd determinant
        raise LatticeError("no odd cofactor in first row")
    low = _lift(minor)
    if j % 2:
        low[0] = [-x for x in low[0]]
    out = [list(r[0])]
    for i in range(1, n):
        row = low[i - 1][:j] + [r[i][j]] + low[i - 1][j:]
        out.append(row)
    d = im.det(out)
    out[0][j] += 1 - d
    return out


def _block_ok_mod2(g, r):
    for i in range(r):
        for j in range(r):
            if g[i][j] != 2 * (i == j):
                return False
            if (g[i][r + j] - (i == j)) % 2:
                return False
    return True


def normalize_mod2_block(q):
    """Put a form with top-left block 2I and top-right block = I mod 2 into
    exact [[2I, I], [I, X']] shape by adding multiples of the x_i to the z_j.

    Returns (P, new Gram) with P = [[I, S], [0, I]].
    """
    q = as_gram(q)
    n = q.rank
    if n % 2:
        raise LatticeError("rank must be even")
    r = n // 2
    g = q.entries
    if not _block_ok_mod2(g, r):
        raise LatticeError("form is not congruent mod 2 to [[2I, I], [I, X]] with exact 2I block")
    p = im.identity(n)
    for i in range(r):
        for j in range(r):
            p[i][r + j] = -((g[i][r + j] - (i == j)) // 2)
    return UnimodularMap(p), q.transform(p)


def _complete_and_fix(q, xs):
    """Given pairwise-orthogonal square-2 vectors xs with surjective pairing,
    build a Definition-1 basis; returns the basis change (columns) or None."""
    rows = q.entries
    n = q.rank
    r = len(xs)
    u = im.complete_basis(im.transpose(xs), n)
    g = im.congruence(rows, u)
    b = [row[r:] for row in g[:r]]
    try:
        binv = im.mod2_inverse(b)
    except ValueError:
        return None
    rt = lift_gl_mod2(binv).rows()
    br = im.matmul(b, rt)
    s = [[((i == j) - br[i][j]) // 2 for j in range(r)] for i in range(r)]
    p = im.identity(n)
    for i in range(r):
        for j in range(r):
            p[i][r + j] = s[i][j]
            p[r + i][r + j] = rt[i][j]
    return im.matmul(u, p)


def _pairing_rank_mod2(q, xs):
    return im.mod2_rank([im.matvec(q.entries, x) for x in xs])


def iter_half_integer_bases(q):
    """Yield one certificate per unordered set of x-vectors (up to sign)."""
    q = _require_pd(q)
    n = q.rank
    if n % 2:
        raise LatticeError("half-integer surgery type needs even rank")
    r = n // 2
    roots = [v for v in vectors_of_norm(q, 2) if next(x for x in v if x) > 0]

    def rec(start, chosen):
        if len(chosen) == r:
            bc = _complete_and_fix(q, chosen)
            if bc is not None:
                g = im.congruence(q.entries, bc)
                par = [g[r + i][r + i] % 2 for i in range(r)]
                yield HalfIntBasis(r, bc, par)
            return
        for k in range(start, len(roots)):
            v = roots[k]
            if any(q.pair(v, c) for c in chosen):
                continue
            cand = chosen + [v]
            if _pairing_rank_mod2(q, cand) < len(cand):
                continue
            yield from rec(k + 1, cand)

    yield from rec(0, [])


def detect_half_integer_type(q, n_even=None):
    """Return a HalfIntBasis certificate or None.

    With ``n_even`` given, only certificates with exactly that many even
    y-squares are accepted.  The search over x-sets is exhaustive.
    """
    q = as_gram(q)
    if q.rank % 2:
        raise LatticeError("half-integer surgery type needs even rank")
    for cert in iter_half_integer_bases(q):
        if n_even is None or cert.even_count == n_even:
            return cert
    return None


def mod4_congruence_holds(q, b: HalfIntBasis) -> bool:
    """det Q == prod(2 m_i - 1) mod 4 for the y-squares m_i of the certificate."""
    q = as_gram(q)
    b.validate(q)
    prod = 1
    for m in b.y_squares(q):
        prod *= 2 * m - 1
    return (determinant(q) - prod) % 4 == 0


def _check_inclusion(q_m, inclusion):
    q_m = as_gram(q_m)
    inc = [list(map(int, row)) for row in inclusion]
    n = q_m.rank
    if len(inc) != n or any(len(row) != n for row in inc):
        raise LatticeError("inclusion must be a square matrix of the lattice rank")
    l = abs(im.det(inc))
    if l == 0:
        raise LatticeError("inclusion is not of full rank")
    if l % 2 == 0:
        raise LatticeError(f"sublattice index {l} is even")
    return q_m, inc, l


def _extend_basis(q_m, inclusion, b_l):
    q_m, inc, _ = _check_inclusion(q_m, inclusion)
    q_l = q_m.transform(inc)
    b_l.validate(q_l)
    r = b_l.r
    n = 2 * r
    c = im.matmul(inc, [list(row) for row in b_l.basis_change])  # L's x,y in M coordinates
    xs_cols = [row[:r] for row in c]
    u = im.complete_basis(xs_cols, n)
    p = im.matmul(im.unimodular_inverse(u), c)
    rblock = [row[r:] for row in p[r:]]
    rt = lift_gl_mod2(rblock).rows()
    pt = im.identity(n)
    for i in range(r):
        for j in range(r):
            pt[i][r + j] = p[i][r + j]
            pt[r + i][r + j] = rt[i][j]
    return im.matmul(u, pt)


def extend_basis_odd_index(q_m, inclusion, b_l):
    """Gram matrix of M in a basis x_1..x_r, z_1..z_r congruent mod 2 to Q_L.

    ``inclusion`` has as columns the M-coordinates of L's basis; ``b_l``
    certifies L (with Gram inclusion^T Q_M inclusion) as half-integer type.
    """
    bc = _extend_basis(q_m, inclusion, b_l)
    return as_gram(q_m).transform(bc)


def promote_half_integer(q_m, inclusion, b_l):
    """Certificate for M from a certificate for an odd-index sublattice L."""
    q_m = _require_pd(q_m)
    bc = _extend_basis(q_m, inclusion, b_l)
    p, g = normalize_mod2_block(q_m.transform(bc))
    total = im.matmul(bc, p.rows())
    r = b_l.r
    par = [g[r + i, r + i] % 2 for i in range(r)]
    cert = HalfIntBasis(r, total, par)
    cert.validate(q_m)
    return cert


def half_integer_form(x_block):
    """The form [[2I, I], [I, X]] for a symmetric r x r integer matrix X."""
    r = len(x_block)
    g = im.zeros(2 * r, 2 * r)
    for i in range(r):
        g[i][i] = 2
        g[i][r + i] = g[r + i][i] = 1
        for j in range(r):
            g[r + i][r + j] = x_block[i][j]
    return GramMatrix(g)


def standard_certificate(r, x_block):
    return HalfIntBasis(r, im.identity(2 * r), [x_block[i][i] % 2 for i in range(r)])
