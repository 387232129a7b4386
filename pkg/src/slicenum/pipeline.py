"""Command implementations behind the ``slicenum`` CLI.

Each ``cmd_*`` takes a config object, returns a JSON-ready result and never
prints; formatting and exit codes live in ``cli``.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import ALGORITHM_VERSION
from .cache import Cache, NullCache
from .embed import (
    dual_embedding_classes,
    donaldson_slicing_obstruction,
    embed_in_zn,
    orth_complement,
    plumbing_gram,
    PlumbingSpec,
)
from .forms import FormConstraints, enumerate_forms
from .knots import (
    KnotRecord,
    SliceQuery,
    TwoBridgeKnot,
    ingest_table,
    kn_determinant,
    kn_family,
    lookup_knot,
    record_for_two_bridge,
)
from .lattice import GramMatrix
from .lens import DTable, LensSpace, d_invariants
from .obstruct import ObstructionReport, slicing_obstruction

log = logging.getLogger(__name__)


class PipelineError(Exception):
    """Bad input or an unsupported request; maps to exit code 2."""


def parse_fraction(text: str):
    try:
        a, b = text.split("/")
        return int(a), int(b)
    except ValueError:
        raise PipelineError(f"expected p/q, got {text!r}") from None


def open_cache(cache_dir):
    return Cache(cache_dir) if cache_dir else NullCache()


def write_json_atomic(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# cached building blocks

def cached_dtable(cache, y: LensSpace) -> DTable:
    value = cache.memo("dtable", y.to_json(), lambda: d_invariants(y).to_json())
    return DTable.from_json(value)


def cached_forms(cache, c: FormConstraints):
    inputs = {"r": c.r, "det": c.det_target, "n_even": c.n_even}
    value = cache.memo("forms", inputs, lambda: [g.to_json() for g in enumerate_forms(c)])
    return [GramMatrix.from_json(g) for g in value]


# ---------------------------------------------------------------------------
# slice-check

@dataclass
class RunConfig:
    knot: Optional[str] = None
    two_bridge: Optional[str] = None
    p_pos: int = 0
    n_neg: Optional[int] = None
    require_conjugation_symmetry: bool = False
    experimental_square_quotient: bool = False
    forms_only: bool = False
    table: Optional[str] = None
    cache_dir: Optional[str] = None
    output: Optional[str] = None
    threads: int = 1
    warnings: list = field(default_factory=list)


def resolve_knot(cfg: RunConfig) -> KnotRecord:
    if (cfg.knot is None) == (cfg.two_bridge is None):
        raise PipelineError("give exactly one of a knot name or --two-bridge p/q")
    if cfg.two_bridge is not None:
        p, q = parse_fraction(cfg.two_bridge)
        try:
            k = TwoBridgeKnot(p, q)
        except ValueError as exc:
            raise PipelineError(str(exc)) from None
        return record_for_two_bridge(k, name=f"S({p},{q})")
    if cfg.table:
        for rec in ingest_table(cfg.table):
            if rec.name == cfg.knot:
                return rec
    try:
        return lookup_knot(cfg.knot)
    except KeyError as exc:
        raise PipelineError(str(exc.args[0])) from None


def _signature_report(rec, cfg, n):
    return ObstructionReport(
        knot=rec.name, p=cfg.p_pos, n=n, determinants_tried=[], forms=[],
        conclusion="obstructed")


def cmd_slice_check(cfg: RunConfig) -> ObstructionReport:
    start = time.perf_counter()
    rec = resolve_knot(cfg)
    half = rec.abs_signature // 2
    n = half if cfg.n_neg is None else cfg.n_neg
    if n < half:
        msg = (f"n = {n} is below sigma/2 = {half}; the signature bound already "
               "rules this out")
        cfg.warnings.append(msg)
        log.info(msg)
        report = _signature_report(rec, cfg, n)
    elif n > half:
        raise PipelineError(f"only n = sigma/2 = {half} is covered by this test, got n = {n}")
    else:
        query = SliceQuery(rec, cfg.p_pos, n)
        cache = open_cache(cfg.cache_dir)
        if rec.two_bridge is None:
            if not cfg.forms_only:
                raise PipelineError(f"{rec.name} has no two-bridge description; "
                                    "use --forms-only to list candidate forms")
            report = _forms_only_report(rec, query, cache, cfg)
        else:
            report = slicing_obstruction(
                query,
                require_conjugation_symmetry=cfg.require_conjugation_symmetry,
                experimental_square_quotient=cfg.experimental_square_quotient,
                threads=cfg.threads,
                enumerate_fn=lambda c: cached_forms(cache, c),
                dtable_fn=lambda y: cached_dtable(cache, y),
            )
    report.wall_time_ms = int((time.perf_counter() - start) * 1000)
    if cfg.output:
        write_json_atomic(cfg.output, report.to_json())
    return report


def _forms_only_report(rec, query, cache, cfg):
    from .forms import admissible_determinants

    forms = []
    dets = admissible_determinants(rec.determinant)
    for dt in dets:
        for g in cached_forms(cache, FormConstraints(query.r, dt, query.n_neg)):
            forms.append({"gram": g.to_json(), "determinant": dt, "verdict": "unchecked"})
    return ObstructionReport(rec.name, query.p_pos, query.n_neg, dets, forms,
                             conclusion="unchecked")


# ---------------------------------------------------------------------------
# thin wrappers

def cmd_enum_forms(rank: int, det: int, n_even: int, cache_dir=None):
    if rank % 2:
        raise PipelineError("rank must be even (rank = 2r)")
    try:
        c = FormConstraints(rank // 2, det, n_even)
    except ValueError as exc:
        raise PipelineError(str(exc)) from None
    return cached_forms(open_cache(cache_dir), c)


def cmd_dinv(lens: str, reversed_orientation=False, cache_dir=None) -> DTable:
    p, q = parse_fraction(lens)
    try:
        y = LensSpace(p, q % p if p > 1 else 0)
    except ValueError as exc:
        raise PipelineError(str(exc)) from None
    if reversed_orientation:
        y = y.reversed()
    return cached_dtable(open_cache(cache_dir), y)


def cmd_embed(weights=None, m=None, dual_kn=None):
    """Embedding classes of a linear plumbing into Z^m, with complements."""
    if dual_kn is not None:
        classes = dual_embedding_classes(dual_kn, m)
        return {
            "lattice": f"dual plumbing of K_{dual_kn}",
            "classes": [{
                "vectors": [list(v[:c.support]) for v in c.embedding.vectors],
                "support": c.support,
                "complement": None if c.complement is None else c.complement.to_json(),
            } for c in classes],
        }
    if not weights or m is None:
        raise PipelineError("embed needs --plumbing and --m, or --dual-kn")
    spec = PlumbingSpec(tuple(weights))
    out = []
    for e in embed_in_zn(plumbing_gram(spec), m):
        comp = orth_complement(e) if m > len(e.vectors) else None
        out.append({"vectors": e.to_json(),
                    "complement": None if comp is None else comp.to_json()})
    return {"lattice": list(spec.weights), "m": m, "classes": out}


def cmd_kn(n: int, check_donaldson=False, r=None, k=6):
    if n < 1:
        raise PipelineError("n must be at least 1")
    knot = kn_family(n)
    out = {
        "knot": f"K{n}",
        "two_bridge": {"p": knot.p, "q": knot.q},
        "determinant": kn_determinant(n),
        "continued_fraction": knot.continued_fraction(),
        "signature": record_for_two_bridge(knot).signature,
    }
    if check_donaldson:
        rep = donaldson_slicing_obstruction(n, n if r is None else r, k)
        out["donaldson"] = rep.to_json()
        out["conclusion"] = out["donaldson"]["conclusion"]
    return out


def cmd_ingest(path):
    return [rec.to_json() for rec in ingest_table(path)]


def version_info():
    from . import __version__

    return {"version": __version__, "algorithm_version": ALGORITHM_VERSION}
