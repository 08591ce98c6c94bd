"""Command-line entry point: ``schlicht {member,sweep,certify}``.

Exit codes: ``member`` returns 0 when the class inequality holds on the grid,
1 when it is violated; ``certify`` returns 0 when at least one certificate is
issued, 1 otherwise; every command returns 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import series as ps
from .classes import DiskGrid, membership_ctc, membership_halfplane, membership_u
from .errors import NonconstantRequiredError, SchlichtError
from .families import AtomicMeasure, CirclePoint, FamilyId, family_series
from .functionals import FunctionalSpec, maximize_on_circle, sweep_csv
from .support import (MEMBERSHIP_TAIL_TOL, certify_candidate, class_support_filter,
                      second_coeff_functional)


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--order", type=int, default=None,
                   help="series order (default 128, raised automatically for built-ins "
                        "when the grid needs more)")
    p.add_argument("--grid-radii", type=int, default=32)
    p.add_argument("--grid-angles", type=int, default=256)
    p.add_argument("--grid-rmax", type=float, default=0.99)
    p.add_argument("--coarse-samples", type=int, default=4096)
    p.add_argument("--tol", type=float, default=1e-12, help="refinement tolerance on the circle")
    p.add_argument("--out", type=Path, default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="schlicht", parents=[common],
                                     description="Membership, circle sweeps and support-point certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("member", parents=[common], help="grid membership check")
    m.add_argument("--class", dest="klass", required=True,
                   choices=["u", "g", "starlike", "convex", "ctc"])
    src = m.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=["koebe", "g-extreme"])
    src.add_argument("--series", type=Path)
    m.add_argument("--theta", type=float, default=0.0)
    m.add_argument("--lambda", dest="lam", type=float, default=1.0)
    m.add_argument("--alpha", type=float, default=0.0)
    wrt = m.add_mutually_exclusive_group()
    wrt.add_argument("--wrt", type=Path, help="starlike reference series for ctc (default: f)")
    wrt.add_argument("--wrt-builtin", choices=["koebe", "g-extreme"])
    m.add_argument("--wrt-theta", type=float, default=0.0)

    for name, helptext in (("sweep", "tabulate G and H on the circle"),
                           ("certify", "issue support-point certificates")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        fn = s.add_mutually_exclusive_group(required=True)
        fn.add_argument("--functional", type=Path)
        fn.add_argument("--phi", type=float, metavar="THETA",
                        help="second-coefficient functional conj(x0) a_2 at x0 = e^{i THETA}")
        s.add_argument("--family", default="koebe", choices=["koebe", "g"])
        if name == "certify":
            s.add_argument("--candidate", type=Path, help="atomic measure JSON")
    return parser


def _grid(args) -> DiskGrid:
    return DiskGrid.geometric(args.grid_radii, args.grid_angles, r_max=args.grid_rmax)


def _read_json(path: Path):
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_series(path: Path) -> ps.TaylorSeries:
    try:
        return ps.TaylorSeries.from_dict(_read_json(path))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _builtin(name: str, theta: float, order: int) -> ps.TaylorSeries:
    return family_series(FamilyId.parse(name), CirclePoint(theta), order)


def _auto_order(args, grid: DiskGrid) -> int:
    if args.order is not None:
        return args.order
    if args.klass == "u":
        return ps.DEFAULT_ORDER
    return ps.required_order(grid.r_max, MEMBERSHIP_TAIL_TOL, scale=3.0, power=0)


def _functional(args) -> FunctionalSpec:
    if args.phi is not None:
        return second_coeff_functional(CirclePoint(args.phi))
    return FunctionalSpec.from_dict(_read_json(args.functional))


def _emit(args, text: str):
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_member(args) -> int:
    grid = _grid(args)
    order = _auto_order(args, grid)
    f = _load_series(args.series) if args.series else _builtin(args.builtin, args.theta, order)
    if args.klass == "u":
        v = membership_u(f, args.lam, grid)
    elif args.klass == "g":
        v = membership_halfplane(f, "convex_shift", -0.5, grid)
    elif args.klass == "convex":
        v = membership_halfplane(f, "convex_shift", 0.0, grid)
    elif args.klass == "starlike":
        v = membership_halfplane(f, "starlike", 0.0, grid)
    else:
        if args.wrt is not None:
            g = _load_series(args.wrt)
        elif args.wrt_builtin is not None:
            g = _builtin(args.wrt_builtin, args.wrt_theta, f.order)
        else:
            g = f
        v = membership_ctc(f, g, args.alpha, grid)
    _emit(args, json.dumps(v.to_dict(), sort_keys=True) + "\n")
    return 0 if v.holds else 1


def cmd_sweep(args) -> int:
    J = _functional(args)
    family = FamilyId.parse(args.family)
    csv_text = sweep_csv(J, family, args.coarse_samples)
    res = maximize_on_circle(J, family, args.coarse_samples, refine_tol=args.tol)
    out = args.out if args.out is not None else Path("sweep.csv")
    out.write_text(csv_text)
    summary = res.to_dict()
    summary["csv"] = str(out)
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return 0


def cmd_certify(args) -> int:
    J = _functional(args)
    family = FamilyId.parse(args.family)
    grid = _grid(args)
    try:
        if args.candidate is not None:
            mu = AtomicMeasure.from_dict(_read_json(args.candidate))
            certs = [certify_candidate(J, family, mu, grid, args.coarse_samples)]
        else:
            certs = class_support_filter(J, family, grid, args.coarse_samples)
    except NonconstantRequiredError as exc:
        _emit(args, json.dumps({"certificates": [], "error": f"nonconstant required: {exc}"},
                               sort_keys=True, indent=2) + "\n")
        print(f"schlicht: nonconstant required: {exc}", file=sys.stderr)
        return 1
    doc = {"certificates": [c.to_dict() for c in certs]}
    _emit(args, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return 0 if any(c.certified for c in certs) else 1


COMMANDS = {"member": cmd_member, "sweep": cmd_sweep, "certify": cmd_certify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SchlichtError, ValueError, KeyError) as exc:
        print(f"schlicht: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
