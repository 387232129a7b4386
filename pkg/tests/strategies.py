"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from slicenum import intmat as im
from slicenum.lattice import half_integer_form


@st.composite
def unimodular(draw, n, steps=6):
    """Random product of elementary integer operations (determinant +-1)."""
    m = im.identity(n)
    for _ in range(draw(st.integers(0, steps))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1))
        kind = draw(st.sampled_from(["add", "swap", "neg"]))
        if kind == "add" and i != j:
            c = draw(st.integers(-2, 2))
            for row in m:
                row[i] += c * row[j]
        elif kind == "swap":
            for row in m:
                row[i], row[j] = row[j], row[i]
        else:
            for row in m:
                row[i] = -row[i]
    return m


@st.composite
def x_blocks(draw, r):
    """Symmetric X with 2X - I positive definite (diagonally dominant)."""
    off = {}
    for i in range(r):
        for j in range(i + 1, r):
            off[i, j] = draw(st.integers(-2, 2))
    x = im.zeros(r, r)
    for (i, j), v in off.items():
        x[i][j] = x[j][i] = v
    for i in range(r):
        row = sum(abs(x[i][j]) for j in range(r) if j != i)
        x[i][i] = row + draw(st.integers(1, 4))
    return x


@st.composite
def half_integer_forms(draw, r_min=1, r_max=4):
    r = draw(st.integers(r_min, r_max))
    x = draw(x_blocks(r))
    return r, x, half_integer_form(x)


@st.composite
def invertible_mod2(draw, n_max=6):
    n = draw(st.integers(1, n_max))
    m = draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n),
                      min_size=n, max_size=n))
    if im.mod2_rank(m) < n:
        # fall back to a random permutation of an upper unitriangular matrix
        perm = draw(st.permutations(range(n)))
        u = [[1 if i == j else (draw(st.integers(0, 1)) if j > i else 0) for j in range(n)]
             for i in range(n)]
        m = [u[p] for p in perm]
    return m
