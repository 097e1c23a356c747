"""Command-line entry point ``slopelab``.

Every subcommand prints deterministic JSON (or CSV/SVG when asked) that
includes the exact parameters it ran with.  Library errors become a JSON
diagnostic on stdout and exit code 2; a failed invariant exits with 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .coding import (BlockFamily, classify_markov, coding_core,
                     find_lambda_for_itinerary, parse_itinerary, point_from_itinerary)
from .errors import ScalarParseError, SlopelabError
from .lab import check_maint_hypotheses, mass_escape_probe, run_subdivision, run_subdivision_all
from .lifts import Certified, images_cover, make_F_lambda, transitivity_check, witnesses_csv
from .maps import ZERO, is_constant_slope, map_from_json, map_to_json
from .measures import eigen_residual, lebesgue
from .numeric import format_scalar, parse_scalar, to_decimal
from .semiconj import (build_semiconjugacy, eigenvector_csv, exact_perron, factor_table_csv,
                       markov_eigen_measure, markov_map_from_matrix, perron, transition_matrix,
                       verify_commutation)
from .svg import lift_svg

FIGURE_LAMBDA = Fraction(132, 25)


def scalar(text: str):
    try:
        return parse_scalar(text)
    except ScalarParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def scalar_list(text: str):
    return [scalar(t) for t in text.split(",") if t]


def matrix_arg(text: str):
    try:
        return [[int(v) for v in row.split(",")] for row in text.split(";")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad matrix {text!r}; use rows like 0,1;1,1") from None


def _emit(args, payload, text=None):
    out = text if text is not None else json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _write(path, text):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_map(path):
    with open(path, encoding="utf-8") as fh:
        return map_from_json(json.load(fh))


# -- subcommands ------------------------------------------------------------------


def cmd_family(args) -> int:
    fam = make_F_lambda(args.lam, relaxed=args.relaxed)
    inv = fam.invariants()
    ok = inv["constant_slope"] and inv["integer_dots"] and inv["gap_formula_holds"]
    _emit(args, {"command": "family", "lambda": format_scalar(fam.lam),
                 "b": format_scalar(fam.b), "c": format_scalar(fam.c),
                 "slopes": inv["slopes"], "invariants": inv,
                 "map": map_to_json(fam.lift)})
    return 0 if ok else 1


def cmd_transitive(args) -> int:
    F = _load_map(args.map) if args.map else make_F_lambda(args.lam, relaxed=args.relaxed).lift
    cert = transitivity_check(F)
    payload = {"command": "transitive", "map": map_to_json(F), "result": cert.to_dict()}
    if args.U:
        cover = images_cover(F, tuple(args.U), args.max_steps)
        payload["images_cover"] = {"U": [format_scalar(u) for u in args.U],
                                   "max_steps": args.max_steps, "verdict": cover.verdict,
                                   "step": getattr(cover, "step", None)}
    if args.svg:
        _write(args.svg, lift_svg(F, args.K, cert=cert))
    if args.csv and isinstance(cert, Certified):
        _write(args.csv, witnesses_csv(cert))
    _emit(args, payload)
    return 0 if isinstance(cert, Certified) else 1


def cmd_slopecheck(args) -> int:
    f = _load_map(args.map) if args.map else make_F_lambda(args.lam).lift
    lam = is_constant_slope(f)
    m = lebesgue("window") if f.kind == "interval" else lebesgue("periodic")
    if f.kind == "circle":
        m = lebesgue("circle")
    probe = args.slope if args.slope is not None else lam
    res = eigen_residual(f, m, probe) if probe is not None else None
    consistent = res is None or ((res == 0) == (lam is not None and lam == probe))
    _emit(args, {"command": "slopecheck", "map": map_to_json(f),
                 "constant_slope": format_scalar(lam) if lam is not None else None,
                 "probe": format_scalar(probe) if probe is not None else None,
                 "eigen_residual": format_scalar(res) if res is not None else None,
                 "consistent": consistent})
    return 0 if consistent else 1


def cmd_semiconj(args) -> int:
    if args.matrix:
        n = len(args.matrix)
        part = args.partition or [Fraction(i, n) for i in range(n + 1)]
        f, _, _ = markov_map_from_matrix(args.matrix, part, args.orientation)
    else:
        f = _load_map(args.map)
        part = args.partition
        if not part:
            raise SlopelabError("--partition is required with --map")
    tm = transition_matrix(f, part)
    enc = perron(tm, args.tol)
    exact = exact_perron(tm, enc)
    if exact is None:
        raise SlopelabError("Perron root is not quadratic; exact semiconjugacy unavailable")
    lam, v = exact
    mu, depth = markov_eigen_measure(f, part, lam, v, args.depth)
    sc = build_semiconjugacy(f, mu, lam)
    bad = verify_commutation(sc)
    g_slope = is_constant_slope(sc.factor)
    ok = not bad and g_slope == lam and (sc.factor.continuous or not f.continuous)
    _write(args.csv_eigen, eigenvector_csv(tm.states, v))
    _write(args.csv_factor, factor_table_csv(sc.factor))
    _emit(args, {"command": "semiconj", "source": map_to_json(f),
                 "partition": [format_scalar(p) for p in part],
                 "matrix": tm.as_lists(),
                 "perron": {"lower": format_scalar(enc.lower), "upper": format_scalar(enc.upper),
                            "width": to_decimal(enc.width, 20), "exact": format_scalar(lam)},
                 "eigenvector": [format_scalar(x) for x in v],
                 "measure_depth": depth,
                 "phi": {"grid": [format_scalar(x) for x in sc.grid],
                         "values": [format_scalar(x) for x in sc.phi_values]},
                 "factor": map_to_json(sc.factor),
                 "factor_slope": format_scalar(g_slope) if g_slope is not None else None,
                 "commutation_failures": len(bad), "ok": ok})
    return 0 if ok else 1


def _family_system(lam):
    fam = make_F_lambda(lam)
    return fam, lebesgue("periodic"), [ZERO, fam.b]


def cmd_subdivide(args) -> int:
    fam, mu, P = _family_system(args.lam)
    delta = args.delta if args.delta is not None else 1 - fam.b
    if args.all:
        runs = run_subdivision_all(fam.lift, mu, P, delta, args.N, args.stages, bad_only=True)
        ok = all(r.all_ok for r in runs)
        _emit(args, {"command": "subdivide", "lambda": format_scalar(fam.lam),
                     "delta": format_scalar(delta), "N": args.N, "stages": args.stages,
                     "runs": [r.to_dict() for r in runs], "ok": ok})
        return 0 if ok else 1
    J = tuple(args.J) if args.J else None
    stats = run_subdivision(fam.lift, mu, P, delta, args.N, args.stages, J)
    if args.format == "csv":
        _emit(args, None, stats.to_csv())
    else:
        payload = {"command": "subdivide", **stats.to_dict(), "ok": stats.all_ok}
        _emit(args, payload)
    return 0 if stats.all_ok else 1


def cmd_maint(args) -> int:
    fam, mu, P = _family_system(args.lam)
    delta = args.delta if args.delta is not None else 1 - fam.b
    report = check_maint_hypotheses(fam.lift, mu, P, fam.lam, delta)
    series = mass_escape_probe(fam.lift, args.K, fam.lam, args.steps)
    if args.csv:
        _write(args.csv, series.to_csv())
    _emit(args, {"command": "maint", "lambda": format_scalar(fam.lam),
                 "delta": format_scalar(delta), "K": args.K, "steps": args.steps,
                 "report": report.to_dict(),
                 "mass_series": [format_scalar(m) for m in series.masses],
                 "mass_series_decimal": [to_decimal(m, 12) for m in series.masses],
                 "strictly_decreasing": series.strictly_decreasing()})
    return 0 if report.all_pass else 1


def cmd_markov(args) -> int:
    if args.lam is not None:
        result = classify_markov(args.lam, args.depth, evidence=args.evidence)
        payload = {"command": "markov", **result.to_dict()}
        _emit(args, payload)
        return 0
    it = parse_itinerary(args.itinerary)
    enc = find_lambda_for_itinerary(args.n, it, args.width)
    payload = {"command": "markov", "n": args.n, "itinerary": args.itinerary,
               "width": format_scalar(args.width), "enclosure": enc.to_dict()}
    lam = enc.exact
    if lam is not None:
        result = classify_markov(lam, args.depth)
        payload.update(result.to_dict())
    else:
        payload["lambda"] = None
        probe = classify_markov(enc.lo, args.depth,
                                evidence=isinstance(it, BlockFamily))
        payload["verdict"] = probe.verdict
        payload["heuristic"] = True
    lo, hi = point_from_itinerary(coding_core(enc.lo), it, min(args.depth, 40))
    payload["target_point"] = [to_decimal(lo, 15), to_decimal(hi, 15)]
    _emit(args, payload)
    return 0


def cmd_figure1(args) -> int:
    fam = make_F_lambda(FIGURE_LAMBDA)
    text = lift_svg(fam.lift, args.K, title="F_lambda, lambda = 132/25")
    _emit(args, None, text)
    return 0


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slopelab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the main output here instead of stdout")
        return sp

    sp = common(sub.add_parser("family", help="build F_lambda and report its invariants"))
    sp.add_argument("--lambda", dest="lam", type=scalar, required=True)
    sp.add_argument("--relaxed", action="store_true", help="allow lambda below 2+sqrt(5)")
    sp.set_defaults(func=cmd_family)

    sp = common(sub.add_parser("transitive", help="diagonal-crossing transitivity check"))
    sp.add_argument("--lambda", dest="lam", type=scalar, default=FIGURE_LAMBDA)
    sp.add_argument("--map", help="JSON lift instead of F_lambda")
    sp.add_argument("--relaxed", action="store_true")
    sp.add_argument("--U", type=scalar_list, help="open interval lo,hi for images_cover")
    sp.add_argument("--max-steps", type=int, default=20)
    sp.add_argument("--svg", help="write the graph with diagonals here")
    sp.add_argument("--csv", help="write the witnesses here")
    sp.add_argument("--K", type=int, default=1)
    sp.set_defaults(func=cmd_transitive)

    sp = common(sub.add_parser("slopecheck", help="constant slope vs T_f m = lambda m"))
    sp.add_argument("--map", help="JSON map")
    sp.add_argument("--lambda", dest="lam", type=scalar, default=FIGURE_LAMBDA)
    sp.add_argument("--slope", type=scalar, help="probe eigenvalue (default: the common slope)")
    sp.set_defaults(func=cmd_slopecheck)

    sp = common(sub.add_parser("semiconj", help="Perron data and the semiconjugacy"))
    sp.add_argument("--matrix", type=matrix_arg, help="0/1 rows, e.g. 0,1;1,1")
    sp.add_argument("--map", help="JSON interval map (with --partition)")
    sp.add_argument("--partition", type=scalar_list)
    sp.add_argument("--orientation", type=lambda s: [int(x) for x in s.split(",")])
    sp.add_argument("--tol", type=scalar, default=Fraction(1, 10**12))
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--csv-eigen")
    sp.add_argument("--csv-factor")
    sp.set_defaults(func=cmd_semiconj)

    sp = common(sub.add_parser("subdivide", help="good/bad interval subdivision"))
    sp.add_argument("--lambda", dest="lam", type=scalar, default=FIGURE_LAMBDA)
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--stages", type=int, default=12)
    sp.add_argument("--delta", type=scalar)
    sp.add_argument("--J", type=scalar_list, help="starting basic interval lo,hi")
    sp.add_argument("--all", action="store_true", help="every initially bad interval")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_subdivide)

    sp = common(sub.add_parser("maint", help="hypothesis report and mass-escape probe"))
    sp.add_argument("--lambda", dest="lam", type=scalar, default=FIGURE_LAMBDA)
    sp.add_argument("--delta", type=scalar)
    sp.add_argument("--K", type=int, default=6)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--csv", help="write the mass series here")
    sp.set_defaults(func=cmd_maint)

    sp = common(sub.add_parser("markov", help="parameter search and Markov classification"))
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--itinerary", default="0^inf",
                    help="0^inf, 1^inf, w(p)^inf or blocks:n,n+1")
    sp.add_argument("--width", type=scalar, default=Fraction(1, 10**12))
    sp.add_argument("--depth", type=int, default=64)
    sp.add_argument("--lambda", dest="lam", type=scalar, help="classify this parameter only")
    sp.add_argument("--evidence", action="store_true")
    sp.set_defaults(func=cmd_markov)

    sp = common(sub.add_parser("figure1", help="SVG of F_lambda for lambda = 132/25"))
    sp.add_argument("--K", type=int, default=1)
    sp.set_defaults(func=cmd_figure1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SlopelabError as exc:
        sys.stdout.write(json.dumps(exc.to_dict(), indent=2) + "\n")
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        sys.stdout.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, indent=2) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
