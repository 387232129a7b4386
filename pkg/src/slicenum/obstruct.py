"""Deciding whether a lens space can bound a given positive-definite form.

For a characteristic class of Q with minimal square c^2 and a spin^c
structure s of Y matched to it, a positive-definite filling needs
    c^2 - b_2 >= 4 d(Y, s)   and   c^2 - b_2 - 4 d(Y, s) in 2Z.
Matchings are affine bijections over a group isomorphism coker(Q) -> H_1(Y).
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from . import intmat as im
from .forms import FormConstraints, admissible_determinants, enumerate_forms
from .knots import SliceQuery, branched_double_cover
from .lattice import GramMatrix, LatticeError, as_gram, determinant, iter_ellipsoid, _require_pd
from .lens import DTable, d_invariants, reverse_orientation


class DeterminantMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CharClassData:
    form: GramMatrix
    class_label: tuple
    min_square: Fraction
    square_mod8: Fraction

    @property
    def excess(self) -> Fraction:
        """c^2 - b_2 for the minimal representative."""
        return self.min_square - self.form.rank


def _cokernel_coordinates(q):
    """Smith data for coker(Q): the invariant factors > 1 and the rows of U reading them off."""
    u, d, _ = im.smith(q.rows())
    n = q.rank
    factors = []
    rows = []
    for i in range(n):
        if abs(d[i][i]) != 1:
            factors.append(abs(d[i][i]))
            rows.append(u[i])
    return factors, rows


def _mod8(x: Fraction) -> Fraction:
    return x - 8 * ((x.numerator // x.denominator) // 8)


def characteristic_classes(q) -> list:
    """Minimal squares of characteristic covectors, one entry per class modulo 2Q.

    Labels are coordinates in coker(Q) given by the Smith normal form (a
    class determines its image in coker(Q) when det Q is odd).  Covectors
    are enumerated by increasing square with a doubling bound until every
    class has been met; all covectors up to the bound are seen, so the
    minima are exact.
    """
    q = _require_pd(q)
    n = q.rank
    det = determinant(q)
    if det % 2 == 0:
        raise LatticeError("characteristic class labels need an odd determinant")
    factors, rows = _cokernel_coordinates(q)
    qinv = im.inverse(q.rows())
    gram = [[4 * x for x in row] for row in qinv]
    parity = [q[i, i] % 2 for i in range(n)]
    center = [Fraction(-x, 2) for x in parity]
    ldl = im.ldl(gram)
    bound = Fraction(n)
    while True:
        best = {}
        for u, val in iter_ellipsoid(gram, bound, center=center, ldl=ldl):
            c = [parity[i] + 2 * u[i] for i in range(n)]
            label = tuple(im.dot(r, c) % f for r, f in zip(rows, factors))
            if label not in best or val < best[label]:
                best[label] = val
        if len(best) == det:
            break
        bound *= 2
    return [CharClassData(q, lab, best[lab], _mod8(best[lab])) for lab in sorted(best)]


@dataclass(frozen=True)
class Matching:
    """Spin^c index = (scale * unit * label + shift) mod p."""

    unit: int
    shift: int
    scale: int = 1

    def __call__(self, label, p):
        return (self.scale * self.unit * label + self.shift) % p

    def to_json(self):
        return {"unit": self.unit, "shift": self.shift, "scale": self.scale}


@dataclass(frozen=True)
class FormVerdict:
    form: GramMatrix
    obstructed: bool
    witness: Optional[dict] = None
    matchings_tried: int = 0
    refutations: tuple = field(default=(), compare=False)
    note: str = ""

    def to_json(self):
        out = {
            "gram": self.form.to_json(),
            "verdict": "obstructed" if self.obstructed else "not obstructed",
            "matchings_tried": self.matchings_tried,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.refutations:
            out["refutations"] = list(self.refutations)
        if self.note:
            out["note"] = self.note
        return out


def _first_failure(classes, b2, d: DTable, phi, p):
    for cls in classes:
        i = phi(cls.class_label[0] if cls.class_label else 0, p)
        gap = cls.min_square - b2 - 4 * d[i]
        if gap < 0:
            return cls, i, gap, "inequality"
        if gap.denominator != 1 or gap.numerator % 2:
            return cls, i, gap, "parity"
    return None


def _matchings(ncls, p, q_y, require_conjugation_symmetry):
    """Affine maps from Z/ncls into Z/p over an injective homomorphism."""
    scale = p // ncls
    units = [u for u in range(1, ncls + 1) if gcd(u, ncls) == 1] if ncls > 1 else [1]
    if require_conjugation_symmetry:
        # phi(-x) = conj(phi(x)) with conj(i) = q - 1 - i forces 2 t = q - 1
        shifts = [((q_y - 1) * pow(2, -1, p)) % p]
    else:
        shifts = range(p)
    for u in units:
        for t in shifts:
            yield Matching(u, t, scale)


def check_form(q, d: DTable, require_conjugation_symmetry: bool = False,
               experimental_square_quotient: bool = False) -> FormVerdict:
    q = as_gram(q)
    p = d.space.p
    det = determinant(q)
    if det != p:
        if not experimental_square_quotient:
            raise DeterminantMismatch(f"det Q = {det} but |H_1| = {p}; "
                                      "the square-quotient case is experimental")
        if p % det or not _is_square(p // det):
            raise DeterminantMismatch(f"{p} / {det} is not a square")
    classes = characteristic_classes(q)
    factors, _ = _cokernel_coordinates(q)
    if len(factors) > 1:
        return FormVerdict(q, True, None, 0,
                           note=f"coker(Q) = {' x '.join(f'Z/{f}' for f in factors)} is not cyclic")
    b2 = q.rank
    tried = 0
    refutations = []
    for phi in _matchings(det, p, d.space.q, require_conjugation_symmetry):
        tried += 1
        fail = _first_failure(classes, b2, d, phi, p)
        if fail is None:
            return FormVerdict(q, False, phi.to_json(), tried)
        cls, i, gap, why = fail
        refutations.append({**phi.to_json(), "class": [str(x) for x in cls.class_label],
                            "spin_c": i, "gap": str(gap), "fails": why})
    return FormVerdict(q, True, None, tried, tuple(refutations))


def _is_square(n):
    from math import isqrt
    return n >= 0 and isqrt(n) ** 2 == n


@dataclass
class ObstructionReport:
    knot: str
    p: int
    n: int
    determinants_tried: list
    forms: list
    conclusion: str
    wall_time_ms: int = 0
    orientations: list = field(default_factory=list)

    @property
    def obstructed(self) -> bool:
        return self.conclusion == "obstructed"

    def to_json(self):
        return {
            "knot": self.knot,
            "p": self.p,
            "n": self.n,
            "determinants_tried": self.determinants_tried,
            "forms": self.forms,
            "conclusion": self.conclusion,
            "wall_time_ms": self.wall_time_ms,
        }


def _verdict_against(q, tables, flags):
    """Obstructed only when obstructed against every orientation in ``tables``."""
    verdicts = [check_form(q, t, *flags) for t in tables]
    passing = next((v for v in verdicts if not v.obstructed), None)
    entry = {"gram": as_gram(q).to_json(), "determinant": determinant(q)}
    if passing is not None:
        idx = verdicts.index(passing)
        entry.update(verdict="not obstructed", witness={
            "orientation": tables[idx].space.orientation, **passing.witness})
        return False, entry
    entry["verdict"] = "obstructed"
    entry["matchings_tried"] = sum(v.matchings_tried for v in verdicts)
    notes = [v.note for v in verdicts if v.note]
    if notes:
        entry["note"] = notes[0]
    return True, entry


def slicing_obstruction(query: SliceQuery, require_conjugation_symmetry=False,
                        experimental_square_quotient=False, threads=1,
                        enumerate_fn=enumerate_forms, dtable_fn=d_invariants) -> ObstructionReport:
    start = time.perf_counter()
    rec = query.knot
    if rec.two_bridge is None:
        raise ValueError(f"{rec.name} has no two-bridge description; its double cover is not a lens space")
    det_k = rec.determinant
    y = branched_double_cover(rec.two_bridge)
    table = dtable_fn(y)
    tables = [table] if rec.abs_signature > 0 else [table, reverse_orientation(table)]
    r = query.r
    dets = admissible_determinants(det_k)
    forms = []
    all_obstructed = True
    if r == 0:
        # the only rank-0 form has determinant 1 and a single class with c^2 - b_2 = 0
        ok = det_k == 1 and any(t[0] == 0 for t in tables)
        forms.append({"gram": [], "determinant": 1,
                      "verdict": "not obstructed" if ok else "obstructed"})
        all_obstructed = not ok
        dets = [1] if det_k == 1 else dets
    else:
        flags = (require_conjugation_symmetry, experimental_square_quotient)
        jobs = []
        for dt in dets:
            for g in enumerate_fn(FormConstraints(r, dt, query.n_neg)):
                jobs.append((dt, g))

        def work(job):
            dt, g = job
            if dt != det_k and not experimental_square_quotient:
                return False, {"gram": g.to_json(), "determinant": dt, "verdict": "not obstructed",
                               "note": "index > 1 case not checked without the experimental mode"}
            return _verdict_against(g, tables, flags)

        if threads > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(work, jobs))
        else:
            results = [work(j) for j in jobs]
        for obstructed, entry in results:
            forms.append(entry)
            all_obstructed &= obstructed
    report = ObstructionReport(
        knot=rec.name, p=query.p_pos, n=query.n_neg, determinants_tried=dets, forms=forms,
        conclusion="obstructed" if all_obstructed else "not obstructed",
        wall_time_ms=int((time.perf_counter() - start) * 1000),
    )
    report.orientations = [t.space.orientation for t in tables]
    return report
