"""Exact integer and rational matrix helpers.

Matrices are lists of rows of Python ints (or Fractions where noted); nothing
here ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def congruence(q, p):
    """Return ``P^T Q P``."""
    return matmul(transpose(p), matmul(q, p))


def bilinear(q, u, v):
    return dot(u, matvec(q, v))


def copy(a):
    return [list(r) for r in a]


def det(a):
    """Determinant by Bareiss fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = copy(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def leading_minors(a):
    """All leading principal minors, computed without pivoting."""
    n = len(a)
    m = copy(a)
    out = []
    prev = 1
    for k in range(n):
        out.append(m[k][k])
        if m[k][k] == 0:
            # fall back to direct evaluation for the rest
            out.extend(det([row[: j + 1] for row in a[: j + 1]]) for j in range(k + 1, n))
            return out
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return out


def inverse(a):
    """Inverse over the rationals (Gauss-Jordan with Fractions)."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def unimodular_inverse(a):
    inv = inverse(a)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def ldl(q):
    """Return ``(d, mu)`` with ``x^T Q x = sum_i d[i] (x_i + sum_{j>i} mu[i][j] x_j)^2``.

    Raises ValueError if a pivot is not positive.
    """
    n = len(q)
    a = [[Fraction(x) for x in row] for row in q]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        if a[i][i] <= 0:
            raise ValueError("form is not positive definite")
        d[i] = a[i][i]
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(j, n):
                a[j][k] -= d[i] * mu[i][j] * mu[i][k]
                a[k][j] = a[j][k]
    return d, mu


def floor_sqrt(x):
    """floor(sqrt(x)) for a nonnegative rational x."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative argument")
    return isqrt(x.numerator * x.denominator) // x.denominator


def ext_gcd(a, b):
    """Return ``(g, s, t)`` with ``s a + t b = g = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - k * s1
        t0, t1 = t1, t0 - k * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def smith(a):
    """Smith normal form: returns ``(U, D, V)`` with ``U A V = D``, U, V unimodular.

    Diagonal entries of D are nonnegative and each divides the next.
    """
    m, n = len(a), len(a[0]) if a else 0
    d = copy(a)
    u = identity(m)
    v = identity(n)

    def row_op(i, j, c):  # row_i += c * row_j
        d[i] = [x + c * y for x, y in zip(d[i], d[j])]
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, c):  # col_i += c * col_j
        for row in d:
            row[i] += c * row[j]
        for row in v:
            row[i] += c * row[j]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        nz = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if d[i][t]:
                    row_op(i, t, -(d[i][t] // d[t][t]))
                    if d[i][t]:
                        done = False
            for j in range(t + 1, n):
                if d[t][j]:
                    col_op(j, t, -(d[t][j] // d[t][t]))
                    if d[t][j]:
                        done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if d[i][j] % d[t][t]), None)
                if bad is None:
                    break
                row_op(t, bad[0], 1)
                continue
            nz = [(abs(d[i][t]), i, t) for i in range(t, m) if d[i][t]]
            nz += [(abs(d[t][j]), t, j) for j in range(t, n) if d[t][j]]
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, d, v


def kernel_basis(a):
    """Integer basis (as columns) of ``{x in Z^n : A x = 0}``; saturated by construction."""
    n = len(a[0])
    if not a:
        return identity(n)
    _, d, v = smith(a)
    r = sum(1 for i in range(min(len(d), n)) if d[i][i] != 0)
    return [row[r:] for row in v]


def complete_basis(cols, n):
    """Extend the columns of an n x k matrix to a unimodular n x n matrix.

    The given columns must span a saturated sublattice; otherwise ValueError.
    """
    k = len(cols[0]) if cols else 0
    if k == 0:
        return identity(n)
    u, d, v = smith(cols)
    if any(d[i][i] != 1 for i in range(k)):
        raise ValueError("columns do not extend to a basis")
    # U C V = [I; 0]  =>  C = U^{-1} [V^{-1}; 0] ; first k columns of U^{-1} diag(V^{-1}, I)
    uinv = unimodular_inverse(u)
    vinv = unimodular_inverse(v)
    block = identity(n)
    for i in range(k):
        for j in range(k):
            block[i][j] = vinv[i][j]
    return matmul(uinv, block)


def image_is_everything(a):
    """True iff the integer matrix A (m x n) maps Z^n onto Z^m."""
    m = len(a)
    if m == 0:
        return True
    _, d, _ = smith(a)
    return all(i < len(d[0]) and d[i][i] == 1 for i in range(m))


def mod2_inverse(a):
    """Inverse of a square matrix over GF(2); ValueError if singular."""
    n = len(a)
    m = [[x & 1 for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            raise ValueError("matrix is singular mod 2")
        m[c], m[piv] = m[piv], m[c]
        for r in range(n):
            if r != c and m[r][c]:
                m[r] = [x ^ y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def mod2_rank(a):
    m = [[x & 1 for x in row] for row in a]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                m[r] = [x ^ y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


def signature(a):
    """Signature (positives minus negatives) of a symmetric matrix, by exact congruence diagonalisation."""
    m = [[Fraction(x) for x in row] for row in a]
    n = len(m)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if m[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i != j and m[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes the diagonal entry 2 m_ij (nonzero)
            for k in range(n):
                m[i][k] += m[j][k]
            for k in range(n):
                m[k][i] += m[k][j]
            piv = i
        d = m[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            f = m[i][piv] / d
            if f:
                for k in active:
                    m[i][k] -= f * m[piv][k]
        for i in active:
            m[i][piv] = m[piv][i] = Fraction(0)
    return pos - neg
