"""Command-line front end.

Subcommands: decompose, point, verify-tables, integrate, embeddings.
Exit codes: 0 success, 2 precondition violation, 3 search failure,
4 precision shortfall.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import kernels
from .darmon import (DarmonPoint, TateCurve, build_setup, compute_J,
                     darmon_point, find_embeddings, gamma_tau,
                     normalize_to_gamma1, plan_semi_indefinite,
                     squarefree_part, tate_q)
from .decomp import (LevelIdeal, decompose, decompose_unit_det,
                     factors_to_text, ring_mat, verify_product)
from .errors import SHPointsError
from .integrate import MeasureCtx, recover_value, series_double_integral
from .matrices import Cusp, Mat2
from .modsym import EllCurve, NewformSymbol
from .padic import embed_quad
from .quadfield import QuadElt, parse_quad
from .recognize import match_global_point, recognize_quadratic
from .sintegers import SIntRing
from .tables import DESK_ROWS, find_row, load_rows, validate_fixture_exactness


def _curve_from_args(args) -> EllCurve:
    coeffs = [int(t) for t in args.curve.split()]
    if len(coeffs) != 5:
        raise SHPointsError("--curve needs 5 integers 'a1 a2 a3 a4 a6'")
    return EllCurve(*coeffs, p=args.p)


def _parse_ring(text: str):
    text = text.strip()
    if text.lower().startswith("zp1/"):
        return SIntRing.z_inv_p(int(text[4:]))
    if text.lower().startswith("z[1/"):
        return SIntRing.z_inv_p(int(text[4:-1]))
    if text.lower().startswith("quad"):
        return SIntRing.quad_maximal(int(text[4:]))
    raise SHPointsError(f"unknown ring spec {text!r} "
                        "(use Zp1/<p> or quad<d>)")


def cmd_decompose(args) -> int:
    ring = _parse_ring(args.ring)
    if ring.kind == "rational":
        level = LevelIdeal(ring, ring.elt(Fraction(args.level)))
        entries = [Fraction(t) for t in args.matrix.split()]
    else:
        level = LevelIdeal(ring, ring.elt(parse_quad(args.level, ring.d)))
        entries = [parse_quad(t, ring.d) for t in args.matrix.split(",")]
    if len(entries) != 4:
        raise SHPointsError("--matrix needs 4 entries")
    gamma = ring_mat(ring, entries)
    if args.unit_det:
        factors = decompose_unit_det(gamma, level, search_bound=args.bound)
    else:
        factors = decompose(gamma, level, search_bound=args.bound)
    print(factors_to_text(factors))
    ok = verify_product(factors, gamma, ring)
    print(f"# verified: {ok} ({len(factors)} factors)")
    return 0 if ok else 1


def _result_record(args, row_label, D, point: DarmonPoint, verdict) -> dict:
    J = point.J
    rec = {
        "curve": row_label,
        "D": D,
        "p": args.p if hasattr(args, "p") and args.p else point.tate.curve.p,
        "multiplier": point.multiplier,
        "valuation_J": str(J.valuation),
        "log_J": repr(J.log_value),
        "precision": J.prec,
        "local_point": [repr(c) for c in point.local_point]
        if point.local_point else None,
        "recognition": repr(point.recognition) if point.recognition else None,
        "verdict": repr(verdict) if verdict else None,
    }
    return rec


def _run_one_point(curve: EllCurve, D: int, prec: int, depth: int,
                   bound=None, do_match=True):
    setup = build_setup(curve)
    emb = find_embeddings(setup, D, count=1, prec=prec + 10)[0]
    pt = darmon_point(setup, emb, prec=prec, depth=depth, search_bound=bound)
    X = pt.local_point[0] if pt.local_point else None
    if X is not None and X.v >= 0:
        prec_rec = min(X.v + X.N, prec + 2)
        hb = max(3, int(round((curve.p ** prec_rec) ** (1 / 3) / 2)) - 1)
        try:
            pt.recognition = recognize_quadratic(X.at_absprec(prec_rec), D,
                                                 hb, prec_rec)
        except SHPointsError:
            pt.recognition = None
    verdict = None
    if do_match:
        label_rows = [r for r in load_rows()
                      if r.ainvs == curve.ainvs and r.D == D
                      and r.kind == "point"]
        if label_rows:
            row = label_rows[0]
            verdict = match_global_point(pt.J, pt.multiplier, row.point(),
                                         pt.tate, prec=min(4, prec))
    return pt, verdict


def cmd_point(args) -> int:
    curve = _curve_from_args(args)
    pt, verdict = _run_one_point(curve, args.disc, args.prec, args.depth,
                                 bound=args.bound)
    rec = _result_record(args, args.curve, args.disc, pt, verdict)
    if args.json:
        print(json.dumps(rec, indent=2, sort_keys=True))
    else:
        for k, v in rec.items():
            print(f"{k}: {v}")
    return 0


def cmd_verify_tables(args) -> int:
    bad = validate_fixture_exactness()
    if bad:
        print(f"fixture exactness failures: {bad}")
        return 2
    if args.rows:
        wanted = []
        for tok in args.rows.split(","):
            label, _, dd = tok.partition(":")
            wanted.append((label.strip(), int(dd)))
    else:
        wanted = list(DESK_ROWS)
    all_ok = True
    reports = []
    for label, D in wanted:
        try:
            row = find_row(label, D)
            curve = row.curve()
            pt, verdict = _run_one_point(curve, D, args.prec, args.depth)
            ok = verdict is not None and verdict.matched
            all_ok &= ok
            reports.append((label, D, "matched" if ok else "unmatched",
                            verdict))
        except SHPointsError as exc:
            all_ok = False
            reports.append((label, D, f"error: {exc}", None))
    for label, D, status, verdict in sorted(reports, key=lambda t: (t[0], t[1])):
        extra = f" [{verdict}]" if verdict and verdict.matched else ""
        print(f"{label}:{D}  {status}{extra}")
    return 0 if all_ok else 1


def cmd_integrate(args) -> int:
    curve = _curve_from_args(args)
    setup = build_setup(curve)
    emb = find_embeddings(setup, args.disc, count=1, prec=args.prec + 10)[0]
    tau1 = emb.tau
    g = gamma_tau(setup, emb)
    tau2 = _as_q(g).act(tau1)
    ctx = MeasureCtx(setup.symbol, Cusp(1, 0), Cusp(0))
    res = series_double_integral(ctx, tau1, tau2, args.prec,
                                 moment_depth=args.depth)
    print(f"valuation: {res.valuation}")
    print(f"log: {res.log_value!r}")
    print(f"teichmuller residue: {res.teich.residue()}")
    return 0


def _as_q(g: Mat2) -> Mat2:
    return Mat2(Fraction(g.a), Fraction(g.b), Fraction(g.c), Fraction(g.d))


def cmd_embeddings(args) -> int:
    curve = _curve_from_args(args)
    setup = build_setup(curve)
    embs = find_embeddings(setup, args.disc, count=args.count,
                           prec=args.prec + 6)
    for e in embs:
        print(f"W = {e.W}  (trace {e.W.trace()}, det {e.W.det()})")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="shpoints",
        description="p-adic Stark-Heegner points on curves of composite "
                    f"conductor (kernel backend: {kernels.BACKEND})")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="elementary matrix decomposition")
    d.add_argument("--ring", required=True, help="Zp1/<p> or quad<d>")
    d.add_argument("--level", required=True)
    d.add_argument("--matrix", required=True,
                   help="4 entries; ','-separated for quadratic rings")
    d.add_argument("--bound", type=int, default=10 ** 6)
    d.add_argument("--unit-det", action="store_true")
    d.set_defaults(func=cmd_decompose)

    common = dict(prec=4, depth=4)
    pt = sub.add_parser("point", help="compute one Darmon point")
    for psr in (pt,):
        psr.add_argument("--curve", required=True, help="'a1 a2 a3 a4 a6'")
        psr.add_argument("--p", type=int, required=True)
        psr.add_argument("--disc", type=int, required=True)
        psr.add_argument("--prec", type=int, default=common["prec"])
        psr.add_argument("--depth", type=int, default=common["depth"])
        psr.add_argument("--bound", type=int, default=10 ** 6)
        psr.add_argument("--seed", type=int, default=0)
        psr.add_argument("--json", action="store_true")
    pt.set_defaults(func=cmd_point)

    vt = sub.add_parser("verify-tables", help="batch verification")
    vt.add_argument("--rows", default="", help="e.g. '105A1:29,15A1:13'")
    vt.add_argument("--prec", type=int, default=common["prec"])
    vt.add_argument("--depth", type=int, default=common["depth"])
    vt.add_argument("--workers", type=int, default=1)
    vt.add_argument("--json", action="store_true")
    vt.set_defaults(func=cmd_verify_tables)

    ig = sub.add_parser("integrate", help="raw double integral for (curve, D)")
    ig.add_argument("--curve", required=True)
    ig.add_argument("--p", type=int, required=True)
    ig.add_argument("--disc", type=int, required=True)
    ig.add_argument("--prec", type=int, default=common["prec"])
    ig.add_argument("--depth", type=int, default=common["depth"])
    ig.set_defaults(func=cmd_integrate)

    em = sub.add_parser("embeddings", help="enumerate optimal embeddings")
    em.add_argument("--curve", required=True)
    em.add_argument("--p", type=int, required=True)
    em.add_argument("--disc", type=int, required=True)
    em.add_argument("--count", type=int, default=3)
    em.add_argument("--prec", type=int, default=8)
    em.set_defaults(func=cmd_embeddings)

    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SHPointsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
