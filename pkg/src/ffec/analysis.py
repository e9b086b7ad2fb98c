"""End-to-end curve analysis: invariants, points, lattice, L-function, bounds.

Reports are plain dicts of JSON-safe values.  Everything except the ``timing``
entry is a deterministic function of the input and the options.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Any

import mpmath

from .bounds import BoundContext, check_height_gap, check_regulator_bound, rank_bound
from .curve import EllipticCurve
from .errors import FFECError, IsotrivialError
from .lattice import MordellWeilLattice, independent_subset, lattice_report, regulator
from .lfunction import brumer_Y, l_polynomial, lfunction_report, precision_bits
from .points import canonical_height, is_torsion, naive_height, search_points


@dataclass
class AnalysisOptions:
    search_bound: int = 2
    tol: Fraction = Fraction(1, 10**8)
    height_method: str = "exact"
    lfunc: bool = True
    max_rank: int = 4


def load_corpus(path: str | None = None) -> list[dict]:
    """Curve specs from a JSON file: a list, or {"curves": [...]}.  Defaults to the bundled corpus."""
    if path is None:
        text = resources.files("ffec").joinpath("data/corpus.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    data = json.loads(text) if text.strip() else []
    if isinstance(data, dict):
        data = data.get("curves", [])
    return data


def bundled_number_fields() -> str:
    return resources.files("ffec").joinpath("data/number_fields.csv").read_text()


class _Timer:
    def __init__(self):
        self.stages: dict[str, float] = {}

    def stage(self, name: str):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.stages[name] = round(time.perf_counter() - self.t0, 4)

        return _Ctx()


def _point_entry(P, tol, method) -> dict:
    tor = is_torsion(P)
    h = canonical_height(P, tol, method)
    out = {"point": P.to_json(model=True), "naive_height": naive_height(P), "hhat": h.to_json(), "torsion_order": tor.order if tor else None}
    return out


def analyze_curve(spec: dict | str, options: AnalysisOptions | None = None) -> dict[str, Any]:
    """Full pipeline for one curve.  Raises IsotrivialError / IngestionError."""
    opt = options or AnalysisOptions()
    timer = _Timer()
    with timer.stage("invariants"):
        E = EllipticCurve.from_json(spec)
        E.require_trace_zero()
        inv = E.invariants
    F = E.field
    report: dict[str, Any] = {"label": E.label, "curve": E.model.to_json(), "invariants": inv.to_json()}

    with timer.stage("points"):
        pts = search_points(E, opt.search_bound)
        entries = [_point_entry(P, opt.tol, opt.height_method) for P in pts]
    report["points"] = entries

    with timer.stage("lattice"):
        basis = independent_subset(pts, opt.tol, opt.height_method, opt.max_rank)
        L = MordellWeilLattice.from_points(basis, opt.tol, opt.height_method)
        lat = lattice_report(L)
        lat["basis"] = [P.to_json() for P in basis]
        reg = regulator(L)
    report["lattice"] = lat

    r_an = None
    if opt.lfunc:
        with timer.stage("lfunction"):
            Lp = l_polynomial(E)
            report["lfunction"] = lfunction_report(Lp, inv.nE)
            r_an = Lp.r_an
    else:
        report["lfunction"] = None

    with timer.stage("bounds"):
        ctx = BoundContext(q=F.q, p=F.p, s=inv.s, nE=inv.nE, hE=inv.hE, r=L.r, r_an=r_an, reg_lo=reg.lower, reg_hi=reg.upper)
        bounds: dict[str, Any] = {"regulator_bound": check_regulator_bound(ctx).to_json()}
        gaps = []
        for P, ent in zip(pts, entries):
            if ent["torsion_order"] is None:
                h = canonical_height(P, opt.tol, opt.height_method)
                gaps.append(check_height_gap(h.lower, ctx).to_json() | {"point": P.to_json()})
        bounds["height_gap"] = gaps
        if r_an is not None:
            bounds["rank_bound"] = rank_bound(ctx).to_json() if inv.nE > 1 else None
            bounds["rank_vs_analytic"] = {"r": L.r, "r_an": r_an, "holds": L.r <= r_an}
    report["bounds"] = bounds
    report["constants"] = {
        "c0": bounds["regulator_bound"]["c0"],
        "tol": str(opt.tol),
        "height_method": opt.height_method,
        "search_bound": opt.search_bound,
        "Y": brumer_Y(inv.nE, F.q) if inv.nE > 1 else None,
        "precision_bits": precision_bits(),
    }
    report["status"] = "OK" if not violations(report) else "VIOLATION"
    report["timing"] = timer.stages
    return report


def violations(report: dict) -> list[str]:
    """Names of every failed 'holds' check in an analysis report."""
    out = []
    b = report.get("bounds", {})
    if not b.get("regulator_bound", {}).get("holds", True):
        out.append("regulator_bound")
    for g in b.get("height_gap", []):
        if not g["holds"]:
            out.append(f"height_gap {g['point']}")
    rb = b.get("rank_bound")
    if rb is not None and not rb["holds"]:
        out.append("rank_bound")
    rv = b.get("rank_vs_analytic")
    if rv is not None and not rv["holds"]:
        out.append("rank_vs_analytic")
    mk = report.get("lattice", {}).get("minkowski")
    if mk is not None and not mk["holds"]:
        out.append("minkowski")
    return out


# ---------------------------------------------------------------------------
# batch


def _batch_row(args) -> dict:
    spec, opt = args
    label = spec.get("label") if isinstance(spec, dict) else None
    try:
        rep = analyze_curve(spec, opt)
    except IsotrivialError as exc:
        return {"label": label, "status": "ISOTRIVIAL", "error": str(exc)}
    except (FFECError, ValueError, TypeError, KeyError) as exc:
        return {"label": label, "status": "ERROR", "error": f"{type(exc).__name__}: {exc}"}
    return rep


def run_batch(specs: list, options: AnalysisOptions | None = None, jobs: int = 1, reg_threshold: Fraction = Fraction(1, 2)) -> dict:
    opt = options or AnalysisOptions()
    work = [(s, opt) for s in specs]
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_batch_row, work))  # map keeps input order
    else:
        rows = [_batch_row(w) for w in work]
    return {"summary": summarize(rows, reg_threshold), "curves": rows}


def _reg_value(row) -> Fraction | None:
    lat = row.get("lattice")
    if not lat:
        return None
    reg = lat["regulator"]
    return Fraction(reg["exact"]) if reg.get("exact") else Fraction(reg["value"])


def summarize(rows: list[dict], reg_threshold: Fraction = Fraction(1, 2)) -> dict:
    ok = [r for r in rows if r.get("status") in ("OK", "VIOLATION")]
    positive = [r for r in ok if r["lattice"]["rank"] > 0]
    table = []
    for r in ok:
        table.append(
            {
                "label": r["label"],
                "q": r["curve"]["q"],
                "s": r["invariants"]["s"],
                "hE": r["invariants"]["hE"],
                "nE": r["invariants"]["nE"],
                "rank": r["lattice"]["rank"],
                "r_an": r["lfunction"]["r_an"] if r.get("lfunction") else None,
                "regulator": str(_reg_value(r)),
                "regulator_bound_log10_margin": r["bounds"]["regulator_bound"]["log10_margin"],
                "status": r["status"],
            }
        )
    min_reg = min(positive, key=lambda r: (_reg_value(r), r["label"]), default=None)
    small = sorted(r["label"] for r in positive if r["invariants"]["s"] == 0 and _reg_value(r) <= reg_threshold)
    margins = [r["bounds"]["regulator_bound"]["log10_margin"] for r in ok if r["bounds"]["regulator_bound"]["branch"] == "generic"]
    gap_margins = []
    for r in ok:
        for g in r["bounds"]["height_gap"]:
            gap_margins.append(float(mpmath.log10(mpmath.mpf(g["hhat_lower"]) / mpmath.mpf(g["bound"]))))
    return {
        "curves": len(rows),
        "analyzed": len(ok),
        "violations": sum(1 for r in rows if r.get("status") == "VIOLATION"),
        "errors": [{"index": i, "label": r.get("label"), "status": r["status"], "error": r.get("error")} for i, r in enumerate(rows) if r.get("status") not in ("OK", "VIOLATION")],
        "max_rank": max((r["lattice"]["rank"] for r in ok), default=None),
        "min_positive_regulator": None if min_reg is None else {"label": min_reg["label"], "value": str(_reg_value(min_reg))},
        "min_regulator_bound_log10_margin": min(margins, default=None),
        "min_height_gap_log10_margin": min(gap_margins, default=None),
        "small_regulator_set": {"threshold": str(reg_threshold), "s": 0, "labels": small},
        "table": table,
    }


def to_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default)


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, mpmath.mpf):
        return mpmath.nstr(o, 15)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
