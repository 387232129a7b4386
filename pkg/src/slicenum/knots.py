"""Two-bridge knots, the K_n family, and knot-table ingestion.

Convention: S(p, q) is the two-bridge knot whose branched double cover is
the boundary of the positive-definite plumbing on the continued fraction of
p/q.  Its signature is normalised so that the right-handed trefoil has
signature -2; with this choice S(15, 4) has signature +2 and
Sigma(S(15, 4)) = boundary of P(4, 4).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from . import intmat as im
from .lens import LensSpace, negative_continued_fraction, recompose


def _inverse_mod(q, p):
    return pow(q, -1, p)


# ---------------------------------------------------------------------------
# signature

def _band_slots(m):
    """Cyclic order in which the ends of the m plumbed bands meet the disk."""
    if m == 1:
        return [0, 0]
    seq = [0]
    for i in range(1, m):
        seq += [i, i - 1]
    seq.append(m - 1)
    return seq


def parallel_bands(weights):
    """For each band of the plumbed band surface, whether its two boundary
    strands run in the same direction once the knot is oriented.

    The surface is a disk with m bands attached in the interleaving order of
    a linear plumbing; band i carries weights[i] half twists.  Its boundary
    is traced once and the direction of travel along each band edge recorded.
    """
    m = len(weights)
    seq = _band_slots(m)
    ends = {}
    for pos, band in enumerate(seq):
        ends.setdefault(band, []).append(pos)
    partner = {}
    for band, (s, t) in ends.items():
        if weights[band] % 2 == 0:
            pairs = [((s, "l"), (t, "r")), ((s, "r"), (t, "l"))]
        else:
            pairs = [((s, "l"), (t, "l")), ((s, "r"), (t, "r"))]
        for a, b in pairs:
            partner[a] = b
            partner[b] = a
    n = len(seq)
    direction = {}
    point = (0, "l")
    steps = 0
    while True:
        other = partner[point]
        band = seq[point[0]]
        s = ends[band][0]
        edge = (band, point[1] if point[0] == s else other[1])
        direction[edge] = point[0] == s
        # leave along the disk boundary
        k, side = other
        point = ((k + 1) % n, "l") if side == "r" else ((k - 1) % n, "r")
        steps += 1
        if point == (0, "l"):
            break
    if steps != 2 * m:
        raise ValueError("band surface boundary is not connected (a link, not a knot)")
    return [direction[(b, "l")] == direction[(b, "r")] for b in range(m)]


def raw_signature(p: int, q: int) -> int:
    """Signature of S(p, q) itself (no mirror normalisation).

    The Gordon-Litherland form of the plumbed band surface is the
    positive-definite plumbing matrix (contributing m), and every crossing
    in a band whose strands run parallel is a type II crossing of the same
    handedness, contributing its twist count to the correction term.
    """
    if p == 1:
        return 0
    weights = negative_continued_fraction(p, q)
    par = parallel_bands(weights)
    return len(weights) - sum(a for a, flag in zip(weights, par) if flag)


def even_continued_fraction(p: int, q: int):
    """[c_1, ..., c_k], all even and nonzero, with p/q' = c_1 - 1/(c_2 - ...),
    where q' is the even representative of q modulo p in (-p, p)."""
    if p % 2 == 0:
        raise ValueError("p must be odd")
    qq = q if q % 2 == 0 else q - p
    x = Fraction(p, qq)
    out = []
    while True:
        if x.denominator == 1:
            if x.numerator % 2:
                raise ArithmeticError("expansion ended on an odd entry")
            out.append(int(x))
            return out
        a = 2 * round(x / 2)
        if abs(x - a) >= 1:
            a += 2 if x > a else -2
        out.append(a)
        x = 1 / (a - x)


def seifert_signature(p: int, q: int) -> int:
    """Oracle: signature from the Seifert surface of plumbed twisted annuli.

    S(p, q) bounds a plumbing of unknotted annuli with 2b_i half twists read
    off the even continued fraction; the symmetrised Seifert form is the
    tridiagonal matrix with those entries on the diagonal.
    """
    if p == 1:
        return 0
    entries = even_continued_fraction(p, q)
    k = len(entries)
    mat = im.zeros(k, k)
    for i, c in enumerate(entries):
        mat[i][i] = c
        if i + 1 < k:
            mat[i][i + 1] = mat[i + 1][i] = 1
    return im.signature(mat)


def floor_sum_signature(p: int, q: int) -> int:
    """Oracle: closed formula sum over i of (-1)^floor(i q / p), with q taken odd."""
    if p == 1:
        return 0
    qo = q if q % 2 else q - p
    return -sum((-1) ** ((i * qo) // p) for i in range(1, p))


# ---------------------------------------------------------------------------
# knots

@dataclass(frozen=True)
class TwoBridgeKnot:
    """S(p, q), stored as the mirror with signature >= 0 and with q
    replaced by min(q, q^-1 mod p).  ``mirrored`` records whether the input
    fraction described the other mirror image."""

    p: int
    q: int
    mirrored: bool = field(default=False, compare=False)

    def __post_init__(self):
        p, q = self.p, self.q
        if p < 1 or p % 2 == 0:
            raise ValueError(f"S({p},{q}): p must be odd and positive (even p gives a link)")
        if p == 1:
            if q not in (0, 1):
                raise ValueError("the unknot is S(1, 0)")
            object.__setattr__(self, "q", 0)
            return
        q %= p
        if q == 0 or gcd(p, q) != 1:
            raise ValueError(f"S({p},{self.q}): need gcd(p, q) = 1 and q not divisible by p")
        mirrored = self.mirrored
        if raw_signature(p, q) < 0:
            q = p - q
            mirrored = not mirrored
        q = min(q, _inverse_mod(q, p))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "mirrored", mirrored)

    @property
    def label(self) -> str:
        return f"S({self.p},{self.q})"

    def continued_fraction(self):
        return [] if self.p == 1 else negative_continued_fraction(self.p, self.q)


def kn_family(n: int) -> TwoBridgeKnot:
    """K_n: the two-bridge knot with continued fraction [4, 4, ..., 4] (2n entries)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p, q = recompose([4] * (2 * n))
    return TwoBridgeKnot(p, q)


def kn_determinant(n: int) -> int:
    """p_n from p_k = 4 p_{k-1} - p_{k-2}, p_0 = 1, p_1 = 4, evaluated at k = 2n."""
    a, b = 1, 4
    for _ in range(2 * n - 1):
        a, b = b, 4 * b - a
    return b


def signature(k: TwoBridgeKnot) -> int:
    return raw_signature(k.p, k.q)


def determinant(k: TwoBridgeKnot) -> int:
    return k.p


def branched_double_cover(k: TwoBridgeKnot) -> LensSpace:
    return LensSpace(k.p, k.q)


# ---------------------------------------------------------------------------
# records and tables

class KnotTableError(ValueError):
    pass


@dataclass(frozen=True)
class KnotRecord:
    name: str
    determinant: int
    signature: int
    two_bridge: Optional[TwoBridgeKnot] = None
    slice_genus: Optional[int] = None

    def __post_init__(self):
        if self.determinant < 1 or self.determinant % 2 == 0:
            raise ValueError(f"{self.name}: determinant must be odd and positive")
        if self.signature % 2:
            raise ValueError(f"{self.name}: signature must be even")
        if (self.determinant - self.signature - 1) % 4:
            raise ValueError(f"{self.name}: det {self.determinant} and signature "
                             f"{self.signature} violate det == sigma + 1 (mod 4)")
        if self.two_bridge is not None:
            if self.two_bridge.p != self.determinant:
                raise ValueError(f"{self.name}: determinant differs from two-bridge p")
            if abs(self.signature) != signature(self.two_bridge):
                raise ValueError(f"{self.name}: signature does not match {self.two_bridge.label}")
        if self.slice_genus is not None and self.slice_genus < 0:
            raise ValueError(f"{self.name}: negative slice genus")

    @property
    def abs_signature(self) -> int:
        return abs(self.signature)

    def to_json(self):
        return {
            "name": self.name,
            "determinant": self.determinant,
            "signature": self.signature,
            "two_bridge": None if self.two_bridge is None
            else {"p": self.two_bridge.p, "q": self.two_bridge.q},
            "slice_genus": self.slice_genus,
        }


def record_for_two_bridge(k: TwoBridgeKnot, name=None, slice_genus=None) -> KnotRecord:
    return KnotRecord(name or k.label, k.p, signature(k), k, slice_genus)


@dataclass(frozen=True)
class SliceQuery:
    knot: KnotRecord
    p_pos: int
    n_neg: int

    def __post_init__(self):
        if self.p_pos < 0 or self.n_neg < 0:
            raise ValueError("crossing counts must be nonnegative")
        if 2 * self.n_neg != self.knot.abs_signature:
            raise ValueError(f"n must equal sigma/2 = {self.knot.abs_signature // 2}, got {self.n_neg}")

    @property
    def r(self) -> int:
        return self.p_pos + self.n_neg


COLUMNS = ["name", "determinant", "signature", "two_bridge_p", "two_bridge_q", "slice_genus"]


def _parse_row(row):
    def opt_int(key):
        v = (row.get(key) or "").strip()
        return int(v) if v else None

    name = (row.get("name") or "").strip()
    if not name:
        raise ValueError("missing name")
    det = int(row["determinant"])
    sig = int(row["signature"])
    p, q = opt_int("two_bridge_p"), opt_int("two_bridge_q")
    if (p is None) != (q is None):
        raise ValueError("two_bridge_p and two_bridge_q must both be given or both blank")
    tb = TwoBridgeKnot(p, q) if p is not None else None
    return KnotRecord(name, det, sig, tb, opt_int("slice_genus"))


def parse_table(lines, source="<table>"):
    rows = list(csv.reader(lines))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        return []
    header = [h.strip() for h in rows[0]]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise KnotTableError(f"{source}: header lacks columns {missing}")
    out, errors = [], []
    for lineno, cells in enumerate(rows[1:], start=2):
        try:
            if len(cells) != len(header):
                raise ValueError(f"expected {len(header)} fields, got {len(cells)}")
            out.append(_parse_row(dict(zip(header, cells))))
        except (ValueError, KeyError) as exc:
            errors.append(f"row {lineno}: {exc}")
    if errors:
        raise KnotTableError(f"{source}: " + "; ".join(errors))
    return out


def ingest_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_table(fh, str(path))


def builtin_table():
    from importlib import resources

    text = resources.files("slicenum").joinpath("data/knots.csv").read_text(encoding="utf-8")
    return parse_table(text.splitlines(), "built-in table")


def lookup_knot(name: str) -> KnotRecord:
    for rec in builtin_table():
        if rec.name == name:
            return rec
    if name.startswith("K") and name[1:].isdigit():
        return record_for_two_bridge(kn_family(int(name[1:])), name=name)
    raise KeyError(f"unknown knot {name!r}")
