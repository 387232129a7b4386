"""Lens spaces and their d-invariants.

Orientation convention: ``LensSpace(p, q)`` is the boundary of the
positive-definite linear plumbing whose weights are the continued fraction
of p/q with all entries >= 2 (``orientation="positive"``).  The reversed
space carries ``orientation="reversed"``.

Spin^c structures are indexed by i in {0, ..., p-1}.  On the plumbing side a
characteristic covector c (c_j == a_j mod 2) has chain invariant
S(c) = sum_j (-1)^(m-j) N_{j-1} c_j, where N_j is the j-th leading minor, and
index i is the unique residue with S(c) == N_{m-1} (2i + 1 - p) - 1 modulo p
(p odd) or 2p (p even).  Conjugation c -> -c becomes i -> q - 1 - i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from . import intmat as im
from .lattice import iter_ellipsoid

POSITIVE = "positive"
REVERSED = "reversed"


def negative_continued_fraction(p: int, q: int):
    """[a_1, ..., a_m], all >= 2, with p/q = a_1 - 1/(a_2 - ... - 1/a_m)."""
    if not (0 < q < p) or gcd(p, q) != 1:
        raise ValueError(f"need 0 < q < p with gcd 1, got {p}/{q}")
    out = []
    while q:
        a = -(-p // q)
        out.append(a)
        p, q = q, a * q - p
    return out


def recompose(weights):
    """Inverse of ``negative_continued_fraction``: returns (p, q)."""
    num, den = 1, 0
    for a in reversed(weights):
        num, den = a * num - den, num
    return num, den


def chain_minors(weights):
    """Leading principal minors N_0 = 1, N_1, ..., N_m of the tridiagonal plumbing matrix."""
    n = [1]
    prev = 0
    for a in weights:
        n.append(a * n[-1] - prev)
        prev = n[-2]
    return n


def plumbing_matrix(weights):
    m = len(weights)
    out = im.zeros(m, m)
    for i, a in enumerate(weights):
        out[i][i] = a
        if i + 1 < m:
            out[i][i + 1] = out[i + 1][i] = 1
    return out


@dataclass(frozen=True)
class LensSpace:
    p: int
    q: int
    orientation: str = POSITIVE

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be positive")
        if self.orientation not in (POSITIVE, REVERSED):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.p == 1:
            if self.q not in (0, 1):
                raise ValueError("L(1, q) needs q in {0, 1}")
            object.__setattr__(self, "q", 0)
        elif not (0 < self.q < self.p) or gcd(self.p, self.q) != 1:
            raise ValueError(f"invalid lens space L({self.p}, {self.q})")

    @property
    def order(self) -> int:
        return self.p

    def reversed(self) -> "LensSpace":
        other = REVERSED if self.orientation == POSITIVE else POSITIVE
        return LensSpace(self.p, self.q, other)

    def plumbing_weights(self):
        return [] if self.p == 1 else negative_continued_fraction(self.p, self.q)

    def to_json(self):
        return {"p": self.p, "q": self.q, "orientation": self.orientation}


@dataclass(frozen=True)
class DTable:
    space: LensSpace
    values: tuple = field(default=())

    def __post_init__(self):
        vals = tuple(v if type(v) is Fraction else Fraction(v) for v in self.values)
        if len(vals) != self.space.p:
            raise ValueError("table needs one value per spin^c structure")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def to_json(self):
        return {
            **self.space.to_json(),
            "values": [f"{v.numerator}/{v.denominator}" for v in self.values],
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        space = LensSpace(int(data["p"]), int(data["q"]), data.get("orientation", POSITIVE))
        return cls(space, tuple(Fraction(v) for v in data["values"]))


@lru_cache(maxsize=None)
def _recursion(p, q, i):
    """Reference form of the recursion, one Fraction step per level."""
    if p == 1:
        return Fraction(0)
    return (Fraction(-1, 4) + Fraction((2 * i + 1 - p - q) ** 2, 4 * p * q)
            - _recursion(q, p % q, i % q))


def _recursion_table(p, q):
    """All p values of the recursion at once, in integer arithmetic.

    Unrolled, d(p, q, i) = sum_k (-1)^k [-1/4 + (2 i_k + 1 - p_k - q_k)^2 / (4 p_k q_k)]
    along the Euclidean chain p_{k+1} = q_k, q_{k+1} = p_k mod q_k,
    i_{k+1} = i_k mod q_k; a common denominator avoids Fraction arithmetic.
    """
    if p == 1:
        return [Fraction(0)]
    chain = []
    a, b = p, q
    while a != 1:
        chain.append((a, b))
        a, b = b, a % b
    den = 4
    for a, b in chain:
        den = lcm(den, 4 * a * b)
    weights = [den // (4 * a * b) for a, b in chain]
    base = sum((-1) ** k for k in range(len(chain))) * (den // 4)
    out = []
    for i in range(p):
        num = -base
        ik = i
        for k, (a, b) in enumerate(chain):
            term = weights[k] * (2 * ik + 1 - a - b) ** 2
            num += -term if k % 2 else term
            ik %= b
        out.append(Fraction(num, den))
    return out


def d_invariants(y: LensSpace) -> DTable:
    """d-invariants by the standard lens-space recursion, in this module's labeling."""
    vals = _recursion_table(y.p, y.q)
    if y.orientation == REVERSED:
        vals = [-v for v in vals]
    return DTable(y, tuple(vals))


def conjugate(y: LensSpace, i: int) -> int:
    if not 0 <= i < y.p:
        raise ValueError("spin^c index out of range")
    return (y.q - 1 - i) % y.p


def reverse_orientation(t: DTable) -> DTable:
    return DTable(t.space.reversed(), tuple(-v for v in t.values))


def _index_of_chain_invariant(y: LensSpace, n_prev: int):
    """Map from S(c) reduced mod p (odd p) or 2p (even p) to the spin^c index."""
    p = y.p
    mod = 2 * p if p % 2 == 0 else p
    return mod, {(n_prev * (2 * i + 1 - p) - 1) % mod: i for i in range(p)}


def _min_squares_chain(weights):
    """Minimum of c^T P^{-1} c over characteristic c, per value of the chain invariant S(c).

    A minimiser c of its class satisfies |c_j| <= a_j (the move c -> c -/+ 2 P e_j
    changes the square by 4 (a_j -/+ c_j)), so only that box is searched.
    Writing P = L D L^T from the top gives
    c^T P^{-1} c = sum_j S_j^2 / (N_{j-1} N_j),  S_j = N_{j-1} c_j - S_{j-1},
    so the minimisation is a dynamic programme over the integer S_j.
    The prefix (c_1..c_j) of a minimiser is itself minimal in its class for
    the leading j x j block, whose classes are the residues of S_j mod 2 N_j;
    so at each level only the cheapest states of each residue (ties kept)
    can lie on an optimal path.
    Costs are carried as K_j = N_j * (partial sum), an integer because
    N_j P_j^{-1} is the adjugate of the leading block.
    Returns ({S_m: K_m}, N_m).
    """
    n = chain_minors(weights)
    states = {0: 0}
    for j, a in enumerate(weights):
        nj, nk = n[j], n[j + 1]
        step = 2 * nj
        mod = 2 * nk
        best = {}
        for s, cost in states.items():
            t = -nj * a - s
            base = nk * cost
            for _ in range(a + 1):
                v, rem = divmod(base + t * t, nj)
                if rem:
                    raise ArithmeticError("partial cost is not N_j-integral")
                r = t % mod
                cur = best.get(r)
                if cur is None or v < cur[0]:
                    best[r] = [v, t]
                elif v == cur[0] and t not in cur[1:]:
                    cur.append(t)
                t += step
        states = {t: e[0] for e in best.values() for t in e[1:]}
    return states, n[-1]


def d_oracle_plumbing(y: LensSpace) -> DTable:
    """Independent d-table from characteristic covectors of the plumbing.

    d = min over the class of (c^T P^{-1} c - m) / 4 for the positive-definite
    plumbing P bounded by y (negated for the reversed orientation).
    """
    if y.p == 1:
        vals = [Fraction(0)]
    else:
        weights = y.plumbing_weights()
        m = len(weights)
        states, scale = _min_squares_chain(weights)
        mod, index = _index_of_chain_invariant(y, chain_minors(weights)[m - 1])
        best = [None] * y.p
        for s, cost in states.items():
            i = index.get(s % mod)
            if i is None:
                raise ArithmeticError(f"chain invariant {s} outside the expected coset")
            if best[i] is None or cost < best[i]:
                best[i] = cost
        if any(b is None for b in best):
            raise ArithmeticError("search box missed a spin^c class")
        vals = [Fraction(b - m * scale, 4 * scale) for b in best]
    if y.orientation == REVERSED:
        vals = [-v for v in vals]
    return DTable(y, tuple(vals))


def d_oracle_ellipsoid(y: LensSpace) -> DTable:
    """Slow reference: enumerate characteristic covectors by norm, doubling the bound.

    Only meant for small p; used to cross-check the chain programme.
    """
    if y.p == 1:
        return DTable(y, (Fraction(0),))
    weights = y.plumbing_weights()
    m = len(weights)
    pmat = plumbing_matrix(weights)
    gram = [[4 * x for x in row] for row in im.inverse(pmat)]
    parity = [a % 2 for a in weights]
    center = [Fraction(-x, 2) for x in parity]
    ldl = im.ldl(gram)
    n = chain_minors(weights)
    mod, index = _index_of_chain_invariant(y, n[m - 1])
    sign = [(-1) ** (m - 1 - j) * n[j] for j in range(m)]
    bound = Fraction(m)
    while True:
        best = {}
        for u, val in iter_ellipsoid(gram, bound, center=center, ldl=ldl):
            c = [parity[j] + 2 * u[j] for j in range(m)]
            i = index[sum(s * x for s, x in zip(sign, c)) % mod]
            if i not in best or val < best[i]:
                best[i] = val
        if len(best) == y.p:
            break
        bound *= 2
    vals = [(best[i] - m) / 4 for i in range(y.p)]
    if y.orientation == REVERSED:
        vals = [-v for v in vals]
    return DTable(y, tuple(vals))
