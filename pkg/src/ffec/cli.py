"""Command line: ffec analyze | batch | friedman | lfunc | heights.

Exit codes: 0 all checks hold, 1 input error, 2 a checked inequality failed,
3 isotrivial curve rejected.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import mpmath

from .analysis import AnalysisOptions, analyze_curve, bundled_number_fields, load_corpus, run_batch, to_json, violations
from .bounds import check_friedman, read_number_fields
from .curve import EllipticCurve
from .errors import FFECError, IngestionError, IsotrivialError
from .lattice import MordellWeilLattice
from .lfunction import explicit_formula_audit, l_polynomial, lfunction_report
from .points import CurvePoint, canonical_height, height_pairing, is_torsion, search_points

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_ISOTRIVIAL = 0, 1, 2, 3


def parse_curve_arg(text: str) -> dict:
    """A JSON file, an inline JSON object, or 'q=5; A=t; B=1'."""
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"invalid curve JSON: {exc}") from None
    spec: dict = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise IngestionError(f"expected key=value, got {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        spec[k] = [a.strip() for a in v.strip("[]").split("|")] if k == "a" else v
    if "q" not in spec:
        raise IngestionError("curve text needs q=...")
    return spec


def _fraction(text: str) -> Fraction:
    try:
        val = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if val <= 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return val


def _options(args) -> AnalysisOptions:
    return AnalysisOptions(
        search_bound=args.search_bound,
        tol=args.tol,
        height_method=args.height_method,
        lfunc=not getattr(args, "no_lfunc", False),
    )


def _emit(text: str, out) -> None:
    out.write(text if text.endswith("\n") else text + "\n")


def markdown_report(rep: dict) -> str:
    inv = rep["invariants"]
    lines = [f"## {rep['label']}", "", f"- curve: `{rep['curve']}`"]
    lines.append(f"- deg Delta = {inv['deg_delta']}, h(E) = {inv['hE']}, n_E = {inv['nE']}, s = {inv['s']}")
    lines.append("- bad places: " + ", ".join(f"{b['place']} {b['kodaira']}" for b in inv["bad_places"]))
    lat = rep["lattice"]
    lines.append(f"- rank (searched) = {lat['rank']}, regulator = {lat['regulator']['exact'] or lat['regulator']['value']}")
    if rep.get("lfunction"):
        lf = rep["lfunction"]
        lines.append(f"- L(T) coefficients {lf['coeffs']}, r_an = {lf['r_an']}, audit gap {lf['audit']['gap']:.1e} (Y = {lf['audit']['Y']})")
    rb = rep["bounds"]["regulator_bound"]
    lhs = mpmath.mpf(rb["lhs"])
    rhs = mpmath.mpf(rb["rhs"])
    verdict = "holds" if rb["holds"] else "FAILS"
    lines.append(f"- regulator bound: Reg >= (c0 log 12h(E))^r {verdict}: {mpmath.nstr(lhs, 6, min_fixed=1, max_fixed=0)} >= {mpmath.nstr(rhs, 6, min_fixed=1, max_fixed=0)}")
    gaps = rep["bounds"]["height_gap"]
    lines.append(f"- height gap: {sum(g['holds'] for g in gaps)}/{len(gaps)} non-torsion points hold")
    if rep["bounds"].get("rank_bound"):
        r = rep["bounds"]["rank_bound"]
        lines.append(f"- rank bound ({r['branch']}): r_an = {r['r_an']} vs {r['bounds']}: {'holds' if r['holds'] else 'FAILS'}")
    lines.append(f"- status: **{rep['status']}**")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def cmd_analyze(args, out) -> int:
    spec = parse_curve_arg(args.curve)
    rep = analyze_curve(spec, _options(args))
    if args.markdown:
        _emit(markdown_report(rep), out)
    else:
        if args.no_timing:
            rep.pop("timing", None)
        _emit(to_json(rep), out)
    return EXIT_OK if rep["status"] == "OK" else EXIT_VIOLATION


def cmd_batch(args, out) -> int:
    try:
        specs = load_corpus(args.corpus)
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestionError(f"cannot read corpus: {exc}") from None
    res = run_batch(specs, _options(args), jobs=args.jobs, reg_threshold=args.reg_threshold)
    if args.no_timing:
        for row in res["curves"]:
            row.pop("timing", None)
    if args.markdown:
        s = res["summary"]
        lines = ["| label | q | s | h(E) | n_E | rank | r_an | Reg | log10 margin | status |", "|---|---|---|---|---|---|---|---|---|---|"]
        for t in s["table"]:
            m = t["regulator_bound_log10_margin"]
            lines.append(
                f"| {t['label']} | {t['q']} | {t['s']} | {t['hE']} | {t['nE']} | {t['rank']} | {t['r_an']} | {t['regulator']} | {'-' if m is None else f'{m:.1f}'} | {t['status']} |"
            )
        for e in s["errors"]:
            lines.append(f"| {e['label']} | | | | | | | | | {e['status']} |")
        lines.append("")
        lines.append(f"violations: {s['violations']}; max rank: {s['max_rank']}; min positive regulator: {s['min_positive_regulator']}")
        st = s["small_regulator_set"]
        lines.append(f"positive rank, s = 0, Reg <= {st['threshold']}: {', '.join(st['labels']) or '(none)'}")
        _emit("\n".join(lines), out)
    else:
        _emit(to_json(res if args.full else res["summary"]), out)
    return EXIT_VIOLATION if res["summary"]["violations"] else EXIT_OK


def cmd_friedman(args, out) -> int:
    if args.csv is None:
        lines = bundled_number_fields().splitlines()
    else:
        try:
            with open(args.csv) as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise IngestionError(str(exc)) from None
    records, bad = read_number_fields(lines)
    reps = [check_friedman(r) for r in records]
    result = {
        "records": [r.to_json() for r in reps],
        "rejected": [{"line": n, "error": msg} for n, msg in bad],
        "min_margin1": min((r.margin1 for r in reps), default=None),
        "min_margin2": min((r.margin2 for r in reps), default=None),
        "all_hold": all(r.holds1 and r.holds2 and r.dirichlet_ok for r in reps),
    }
    if args.markdown:
        lines = ["| field | R/w | 0.0031 e^(0.241d+0.497r1) | (1) | R | 0.0062 e^(0.241 r_F) | (2) |", "|---|---|---|---|---|---|---|"]
        for r in reps:
            lines.append(
                f"| {r.label} | {float(r.lhs1):.6g} | {float(r.rhs1):.6g} | {'ok' if r.holds1 else 'FAIL'} | {float(r.lhs2):.6g} | {float(r.rhs2):.6g} | {'ok' if r.holds2 else 'FAIL'} |"
            )
        for b in result["rejected"]:
            lines.append(f"| line {b['line']} | rejected: {b['error']} | | | | | |")
        if reps:
            lines.append("")
            lines.append(f"minimum margin: (1) {result['min_margin1']:.4g}, (2) {result['min_margin2']:.4g}")
        _emit("\n".join(lines), out)
    else:
        _emit(to_json(result), out)
    return EXIT_OK if result["all_hold"] else EXIT_VIOLATION


def cmd_lfunc(args, out) -> int:
    E = EllipticCurve.from_json(parse_curve_arg(args.curve))
    L = l_polynomial(E)
    rep = lfunction_report(L, E.invariants.nE, args.Y)
    rep["audits"] = [explicit_formula_audit(L, Y).to_json() for Y in range(1, args.audit_max_Y + 1)]
    _emit(to_json(rep), out)
    return EXIT_OK


def cmd_heights(args, out) -> int:
    E = EllipticCurve.from_json(parse_curve_arg(args.curve))
    E.require_trace_zero()
    if args.point:
        pts = []
        for text in args.point:
            if "," not in text:
                raise IngestionError(f"point must be 'x,y', got {text!r}")
            x, y = text.split(",", 1)
            pts.append(CurvePoint.from_model(E, x.strip(), y.strip()))
    else:
        pts = search_points(E, args.search_bound)
    rows = []
    for P in pts:
        tor = is_torsion(P)
        h = canonical_height(P, args.tol, args.height_method)
        rows.append({"point": P.to_json(model=True), "torsion_order": tor.order if tor else None, "hhat": h.to_json()})
    result: dict = {"label": E.label, "points": rows}
    free = [P for P, r in zip(pts, rows) if r["torsion_order"] is None]
    if args.pairings and free:
        result["pairings"] = [[str(height_pairing(P, Q, args.tol, args.height_method).value) for Q in free] for P in free]
    _emit(to_json(result), out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ffec", description="Elliptic curves over F_q(t): heights, regulators, L-functions, bound checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, search=True):
        if search:
            p.add_argument("--search-bound", type=int, default=2, help="max h(x) in the point search (default 2)")
        p.add_argument("--tol", type=_fraction, default=Fraction(1, 10**8), help="height tolerance (default 1e-8)")
        p.add_argument("--height-method", choices=["exact", "telescope"], default="exact")

    p = sub.add_parser("analyze", help="full pipeline for one curve")
    p.add_argument("curve", help="JSON file, inline JSON, or 'q=5; A=t; B=1'")
    common(p)
    p.add_argument("--no-lfunc", action="store_true", help="skip the L-function stage")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--markdown", action="store_true", help="markdown summary")
    p.add_argument("--no-timing", action="store_true", help="omit per-stage timings")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("batch", help="analyze a corpus of curves")
    p.add_argument("corpus", nargs="?", default=None, help="JSON corpus (default: bundled corpus)")
    common(p)
    p.add_argument("--no-lfunc", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--reg-threshold", type=_fraction, default=Fraction(1, 2), help="regulator threshold for the finiteness listing")
    p.add_argument("--full", action="store_true", help="include per-curve reports")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--markdown", action="store_true")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("friedman", help="number-field regulator inequalities")
    p.add_argument("csv", nargs="?", default=None, help="label,d,r1,r2,regulator,w (default: bundled table)")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--markdown", action="store_true")
    p.set_defaults(func=cmd_friedman)

    p = sub.add_parser("lfunc", help="L-polynomial, zeros and explicit-formula audit")
    p.add_argument("curve")
    p.add_argument("--Y", type=int, default=None, help="Fejer parameter (default ceil(2 log nE / log q))")
    p.add_argument("--audit-max-Y", type=int, default=10)
    p.set_defaults(func=cmd_lfunc)

    p = sub.add_parser("heights", help="canonical heights of searched or given points")
    p.add_argument("curve")
    common(p)
    p.add_argument("--point", action="append", help="'x,y' in the curve's own coordinates (repeatable)")
    p.add_argument("--pairings", action="store_true", help="also print the pairing matrix")
    p.set_defaults(func=cmd_heights)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except IsotrivialError as exc:
        print(f"ffec: isotrivial curve rejected: {exc}", file=sys.stderr)
        return EXIT_ISOTRIVIAL
    except (FFECError, ValueError) as exc:
        print(f"ffec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
