"""Command-line front end.

Subcommands: shoot, bisect, measure, compare, symmetrize, verify.
Exit codes: 0 success, 1 numerical or verification failure, 2 usage.
Environment variables are never consulted; every knob is a flag.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import GeometryError, IntegrationDomainError, InvalidBracketError
from .geometry import RadialDensity
from .measures import (
    centered_sphere_measures,
    isoperimetric_compare,
    origin_sphere_measures,
    revolve_measures,
)
from .shooting import (
    ShotTolerances,
    curve_to_csv,
    find_closing_kappa0,
    init_shot,
    integrate,
    read_curve_csv,
    summary_record,
)
from .symmetrization import raster_measures, read_raster, symmetrize, write_raster
from .verify import reports_to_csv, run_suite


def _density(args) -> RadialDensity:
    if args.p == 0 and not args.experimental:
        raise GeometryError("p = 0 requires --experimental")
    return RadialDensity(p=args.p)


def _tolerances(args) -> ShotTolerances:
    kw = {}
    if getattr(args, "step_tol", None) is not None:
        kw["step_tol"] = args.step_tol
        kw["abs_tol"] = args.step_tol * 1e-3
    if getattr(args, "event_tol", None) is not None:
        kw["event_tol"] = args.event_tol
    return ShotTolerances(**kw)


def _cmd_shoot(args) -> int:
    cfg = init_shot(args.n, _density(args), args.kappa0,
                    tolerances=_tolerances(args),
                    experimental=args.experimental)
    curve = integrate(cfg)
    if args.out:
        curve_to_csv(curve, args.out)
    if args.svg:
        from .svgplot import curve_svg
        with open(args.svg, "w") as fh:
            fh.write(curve_svg(curve))
    if args.format == "csv" and not args.out:
        sys.stdout.write(curve_to_csv(curve))
    else:
        print(summary_record(curve))
    return 0


def _cmd_bisect(args) -> int:
    lo, hi = (float(v) for v in args.bracket.split(","))
    trace = []
    k0 = find_closing_kappa0(args.n, _density(args), bracket=(lo, hi),
                             tol=args.tol, experimental=args.experimental,
                             trace=trace)
    for k, label in trace:
        print(f"  probe kappa0={k:.9f} -> {label}")
    print(f"closing kappa0 = {k0:.9f}")
    return 0


def _cmd_measure(args) -> int:
    density = _density(args)
    if args.curve:
        cols = read_curve_csv(args.curve)
        pts = np.column_stack([cols["x"], cols["y"]])
        pair = revolve_measures(pts, args.n, density)
        family = f"curve:{args.curve}"
    elif args.family == "origin":
        pair = origin_sphere_measures(args.scale, args.n, density)
        family = "origin"
    else:
        pair = centered_sphere_measures(args.scale, args.n, density)
        family = "centered"
    print(json.dumps({"family": family, "n": args.n, "p": args.p,
                      "scale": args.scale, "perimeter": pair.perimeter,
                      "volume": pair.volume}, indent=2, sort_keys=True))
    return 0


def _cmd_compare(args) -> int:
    ns = [int(v) for v in args.n.split(",")]
    ps = [float(v) for v in args.p.split(",")]
    print("n,p,V,P_origin,P_centered,ratio")
    ok = True
    for n in ns:
        for p in ps:
            res = isoperimetric_compare(n, RadialDensity(p=p), args.volume)
            print(f"{n},{p:g},{args.volume:g},{res.P_origin:.12g},"
                  f"{res.P_centered:.12g},{res.ratio:.12g}")
            ok = ok and res.ratio < 1.0
    return 0 if ok else 1


def _cmd_symmetrize(args) -> int:
    raster = read_raster(args.infile)
    out = symmetrize(raster)
    write_raster(out, args.outfile)
    if args.measures:
        density = RadialDensity(p=args.p)
        before = raster_measures(raster, density)
        after = raster_measures(out, density)
        print(json.dumps({
            "before": {"perimeter": before.perimeter, "volume": before.volume},
            "after": {"perimeter": after.perimeter, "volume": after.volume},
        }, indent=2, sort_keys=True))
    return 0


def _cmd_verify(args) -> int:
    reports = run_suite(seed=args.seed)
    text = reports_to_csv(reports)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    alarming = [r for r in reports if r.alarming]
    for rep in alarming:
        print(f"{rep.status} {rep.check_id}: {rep.details}", file=sys.stderr)
    expected = sum(1 for r in reports if r.expected_failure and not r.passed)
    if expected:
        print(f"note: {expected} documented strong-density divergences "
              f"(reported as xfail)", file=sys.stderr)
    return 1 if alarming else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="isodense",
        description="shooting, measures and symmetrization for the "
                    "isoperimetric problem with radial power density")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, kappa0=False):
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--p", type=float, default=1.0)
        p.add_argument("--experimental", action="store_true",
                       help="allow n=2, p=0 and other degenerate limits")
        if kappa0:
            p.add_argument("--step-tol", type=float, default=None)
            p.add_argument("--event-tol", type=float, default=None)

    p_shoot = sub.add_parser("shoot", help="integrate one generating curve")
    common(p_shoot, kappa0=True)
    p_shoot.add_argument("--kappa0", type=float, required=True)
    p_shoot.add_argument("--out", help="write sampled curve CSV here")
    p_shoot.add_argument("--svg", help="write a plot here")
    p_shoot.add_argument("--format", choices=("json", "csv"), default="json")
    p_shoot.set_defaults(func=_cmd_shoot)

    p_bis = sub.add_parser("bisect", help="bisect to the closing curvature")
    common(p_bis, kappa0=True)
    p_bis.add_argument("--bracket", default="1.1,5.0")
    p_bis.add_argument("--tol", type=float, default=1e-6)
    p_bis.set_defaults(func=_cmd_bisect)

    p_meas = sub.add_parser("measure", help="weighted perimeter and volume")
    common(p_meas)
    p_meas.add_argument("--family", choices=("origin", "centered"),
                        default="origin")
    p_meas.add_argument("--scale", type=float, default=1.0)
    p_meas.add_argument("--curve", help="curve CSV to revolve instead")
    p_meas.set_defaults(func=_cmd_measure)

    p_cmp = sub.add_parser("compare", help="perimeter table at fixed volume")
    p_cmp.add_argument("--n", default="3")
    p_cmp.add_argument("--p", default="1")
    p_cmp.add_argument("--volume", type=float, default=1.0)
    p_cmp.set_defaults(func=_cmd_compare)

    p_sym = sub.add_parser("symmetrize", help="spherically symmetrize a raster")
    p_sym.add_argument("--in", dest="infile", required=True)
    p_sym.add_argument("--out", dest="outfile", required=True)
    p_sym.add_argument("--p", type=float, default=1.0)
    p_sym.add_argument("--measures", action="store_true")
    p_sym.set_defaults(func=_cmd_symmetrize)

    p_ver = sub.add_parser("verify", help="run the check suite")
    p_ver.add_argument("--out", help="write the CSV report here")
    p_ver.add_argument("--seed", type=int, default=20754,
                       help="seed recorded in reports (checks are "
                            "deterministic)")
    p_ver.set_defaults(func=_cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, InvalidBracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IntegrationDomainError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
