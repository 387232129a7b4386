"""Enumeration of positive-definite forms of half-integer surgery type.

A form [[2I, I], [I, X]] has the same determinant as A = 2X - I, and A is
positive definite with odd diagonal and even off-diagonal entries.  Going
the other way, every lattice with such a basis gives back a half-integer
form.  So we enumerate GL(r, Z)-classes of positive-definite A of the target
determinant (Minkowski-reduced box), then every orthonormal frame of A mod 2,
lift the frame to a unimodular change of basis, and map back.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import isqrt

from . import intmat as im
from .lattice import (
    GramMatrix,
    LatticeError,
    canonical_form,
    find_isometry,
    half_integer_form,
    isometry_invariant,
    lift_gl_mod2,
)

log = logging.getLogger(__name__)

# Upper bound for prod(a_ii) / det over Minkowski-reduced forms of rank r.
# r <= 4: successive minima are attained, so Minkowski's second theorem with
# the exact Hermite constants applies.  r = 5, 6 add the (5/4)^k slack of
# reduced diagonals over successive minima.
MINKOWSKI_PRODUCT_BOUND = {
    1: Fraction(1),
    2: Fraction(4, 3),
    3: Fraction(2),
    4: Fraction(4),
    5: Fraction(10),
    6: Fraction(125, 3),
}


@dataclass(frozen=True)
class FormConstraints:
    r: int
    det_target: int
    n_even: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be positive")
        if self.det_target < 1 or self.det_target % 2 == 0:
            raise ValueError("det_target must be an odd positive integer")
        if not 0 <= self.n_even <= self.r:
            raise ValueError("n_even must lie in [0, r]")

    @property
    def rank(self) -> int:
        return 2 * self.r

    def infeasibility(self):
        """Reason string when det mod 4 rules the constraints out, else None.

        det Q == prod(2 m_i - 1) == (-1)^(number of even m_i)  (mod 4).
        """
        expected = 1 if self.n_even % 2 == 0 else 3
        if self.det_target % 4 != expected:
            return (f"det {self.det_target} is {self.det_target % 4} mod 4 but "
                    f"{self.n_even} even y-squares force {expected} mod 4")
        return None


def admissible_determinants(det_k: int):
    """All d >= 1 with d * t^2 == det_k, ascending."""
    if det_k < 1 or det_k % 2 == 0:
        raise ValueError("knot determinant must be an odd positive integer")
    out = []
    t = 1
    while t * t <= det_k:
        if det_k % (t * t) == 0:
            out.append(det_k // (t * t))
        t += 1
    return sorted(out)


def _reduced_box(r, det):
    """All symmetric positive-definite r x r integer matrices with det ``det``,
    nondecreasing diagonal, |2 a_ij| <= a_ii (i < j) and the product bound."""
    if r not in MINKOWSKI_PRODUCT_BOUND:
        raise LatticeError(f"enumeration supports r <= 6, got {r}")
    cap = MINKOWSKI_PRODUCT_BOUND[r] * det
    out = []

    def diagonals(prefix, prod):
        k = len(prefix)
        if k == r:
            yield list(prefix)
            return
        lo = prefix[-1] if prefix else 1
        a = lo
        # remaining entries are >= a, so prod * a^(r-k) <= cap
        while prod * a ** (r - k) <= cap:
            yield from diagonals(prefix + [a], prod * a)
            a += 1

    for diag in diagonals([], 1):
        m = im.zeros(r, r)
        for i in range(r):
            m[i][i] = diag[i]
        slots = [(i, j) for j in range(r) for i in range(j)]
        ranges = [range(-(diag[i] // 2), diag[i] // 2 + 1) for i, _ in slots]
        # fill column by column so leading minors can prune early
        _fill(m, slots, ranges, 0, r, det, out)
    return out


def _fill(m, slots, ranges, idx, r, det, out):
    if idx == len(slots):
        if im.det(m) == det:
            out.append(im.copy(m))
        return
    i, j = slots[idx]
    last_in_column = idx + 1 == len(slots) or slots[idx + 1][1] != j
    for v in ranges[idx]:
        m[i][j] = m[j][i] = v
        if last_in_column:
            minor = im.det([row[: j + 1] for row in m[: j + 1]])
            if minor <= 0:
                continue
            if j == r - 1 and minor != det:
                continue
        _fill(m, slots, ranges, idx + 1, r, det, out)
    m[i][j] = m[j][i] = 0


def _distinct_classes(mats):
    """Canonical forms of the distinct congruence classes among ``mats``.

    Candidates are bucketed by a cheap invariant and merged with an explicit
    isometry search, so the expensive canonical search runs once per class.
    """
    buckets = {}
    for m in mats:
        g = m if isinstance(m, GramMatrix) else GramMatrix(m)
        reps = buckets.setdefault(isometry_invariant(g), [])
        if not any(find_isometry(g, h) is not None for h in reps):
            reps.append(g)
    out = {}
    for reps in buckets.values():
        for g in reps:
            c, _ = canonical_form(g)
            out[c.entries] = c
    return [out[k] for k in sorted(out)]


def gl_classes(r, det):
    """Canonical representatives of the positive-definite rank-r forms of determinant ``det``."""
    if r == 1:
        return [GramMatrix([[det]])]
    return _distinct_classes(_reduced_box(r, det))


def orthonormal_frames_mod2(a):
    """Unordered bases of F_2^r that are orthonormal for the form A mod 2."""
    r = len(a)
    vecs = [v for v in product((0, 1), repeat=r) if any(v)]
    unit = [v for v in vecs if im.bilinear(a, v, v) % 2 == 1]

    def orth(u, v):
        return im.bilinear(a, u, v) % 2 == 0

    frames = []

    def rec(start, chosen):
        if len(chosen) == r:
            if im.mod2_rank([list(v) for v in chosen]) == r:
                frames.append([list(v) for v in chosen])
            return
        for k in range(start, len(unit)):
            v = unit[k]
            if all(orth(v, c) for c in chosen):
                rec(k + 1, chosen + [v])

    rec(0, [])
    return frames


def shape_matrices(a):
    """For each mod-2 orthonormal frame of A, a congruent matrix with odd
    diagonal and even off-diagonal entries."""
    out = []
    for frame in orthonormal_frames_mod2(a.entries if isinstance(a, GramMatrix) else a):
        p = lift_gl_mod2(im.transpose(frame)).rows()
        out.append(im.congruence(a.entries if isinstance(a, GramMatrix) else a, p))
    return out


def x_block_from_a(a):
    r = len(a)
    x = [[a[i][j] // 2 for j in range(r)] for i in range(r)]
    for i in range(r):
        x[i][i] = (a[i][i] + 1) // 2
    return x


def form_from_a(a) -> GramMatrix:
    return half_integer_form(x_block_from_a(a))


def even_y_count(a) -> int:
    """Number of even y-squares m_i = (a_ii + 1) / 2."""
    return sum(1 for i in range(len(a)) if a[i][i] % 4 == 3)


def enumerate_forms(c: FormConstraints):
    """One canonical representative per congruence class of half-integer
    surgery forms meeting the constraints, ascending by canonical entries."""
    why = c.infeasibility()
    if why is not None:
        log.info("no forms: %s", why)
        return []
    qs = []
    for cls in gl_classes(c.r, c.det_target):
        for a in shape_matrices(cls):
            if even_y_count(a) == c.n_even:
                qs.append(form_from_a(a))
    return _distinct_classes(qs)


def brute_force_forms(c: FormConstraints):
    """Independent enumeration for r <= 2 straight from the A-matrix box.

    Reduction by moves congruent to a permutation mod 2 (swaps and adding
    even multiples of one basis vector to another) brings any shape matrix
    [[a, b], [b, c]] to a <= c, |b| <= a - 1, hence 2a - 1 <= det.
    """
    if c.r > 2:
        raise ValueError("brute-force oracle only covers r <= 2")
    d = c.det_target
    mats = []
    if c.r == 1:
        if d % 2 == 1:
            mats.append([[d]])
    else:
        for a in range(1, (d + 1) // 2 + 1, 2):
            for b in range(-(a - 1), a, 2):
                num = d + b * b
                if num % a:
                    continue
                cc = num // a
                if cc >= a and cc % 2 == 1:
                    mats.append([[a, b], [b, cc]])
    found = {}
    for a in mats:
        if even_y_count(a) != c.n_even:
            continue
        g, _ = canonical_form(form_from_a(a))
        found.setdefault(g.entries, g)
    return [found[k] for k in sorted(found)]


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
