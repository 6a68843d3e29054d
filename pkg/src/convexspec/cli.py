"""Command-line driver: ``convexspec spectrum | net | partition | verify | experiment``.

Exit status is 0 when every hard check passes, 1 when one fails and 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic
from .corpus import ExperimentConfig
from .discretize import ALL_DIRICHLET, ALL_NEUMANN, BoundarySpec
from .geom import Box, ConvexPolygon, polygon_new, regular_polygon, unit_square
from .nets import maximal_separated_net, voronoi_partition
from . import serialize as io
from . import verify as V


class UsageError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _points(text: str) -> list[tuple[float, float]]:
    """'x,y;x,y;...' -> list of points."""
    pts = [_floats(p) for p in text.split(";") if p.strip()]
    if any(len(p) != 2 for p in pts):
        raise argparse.ArgumentTypeError("points are 'x,y' pairs separated by ';'")
    return pts


def _domain_args(p: argparse.ArgumentParser, prefix: str = "", required: bool = False) -> None:
    g = p.add_argument_group("domain" if not prefix else f"{prefix} domain")
    dest = prefix.replace("-", "_")
    g.add_argument(f"--{prefix}domain", dest=f"{dest}domain", metavar="FILE",
                   help="JSON file with 'vertices' or 'box'")
    g.add_argument(f"--{prefix}polygon", dest=f"{dest}polygon", type=_points, metavar="PTS",
                   help="inline vertices 'x,y;x,y;...' (hull is taken)")
    if not prefix:
        g.add_argument("--square", action="store_true", help="unit square")
        g.add_argument("--regular", type=_floats, metavar="M,R", help="regular M-gon of radius R")
        g.add_argument("--box", type=_floats, metavar="L1,..", help="box [0,L1] x ... (analytic)")
        g.add_argument("--torus", type=_floats, metavar="L1,..", help="flat torus (analytic)")
        g.add_argument("--disk", type=float, metavar="R", help="disk of radius R (analytic)")


def _polygon(args, prefix: str = "") -> ConvexPolygon | None:
    dest = prefix.replace("-", "_")
    path = getattr(args, f"{dest}domain", None)
    pts = getattr(args, f"{dest}polygon", None)
    if path:
        d = io.read_domain(path)
        if isinstance(d, Box):
            return d.as_polygon() if d.dim == 2 else None
        return d
    if pts:
        return polygon_new(pts)
    if not prefix and getattr(args, "square", False):
        return unit_square()
    if not prefix and getattr(args, "regular", None):
        m, r = args.regular
        return regular_polygon(int(m), r)
    return None


def _require_polygon(args, prefix: str = "") -> ConvexPolygon:
    P = _polygon(args, prefix)
    if P is None:
        raise UsageError(f"a polygon is required (--{prefix}domain or --{prefix}polygon)")
    return P


def _boundary(args, P: ConvexPolygon) -> BoundarySpec:
    if args.bc == "neumann":
        return ALL_NEUMANN
    if args.bc == "dirichlet":
        return ALL_DIRICHLET
    if not args.neumann_edges:
        raise UsageError("--bc mixed needs --neumann-edges")
    return BoundarySpec.from_edges(P, [int(e) for e in args.neumann_edges])


def _emit(obj, out, config) -> None:
    text = io.dumps(obj, config)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    d = {k: v for k, v in vars(args).items() if k != "func"}
    return json.loads(json.dumps(d, default=str))


# -- subcommands -------------------------------------------------------------

def cmd_spectrum(args) -> int:
    if args.box:
        s = analytic.box_spectrum(args.box, args.bc.upper(), args.count)
    elif args.torus:
        s = analytic.torus_spectrum(args.torus, args.count)
    elif args.disk:
        s = analytic.disk_spectrum(args.disk, args.bc.upper(), args.count)
    else:
        P = _require_polygon(args)
        s = V.fem_spectrum(P, _boundary(args, P), args.h, args.count, args.tol)
    _emit(s, args.out, _config(args))
    return 0


def cmd_net(args) -> int:
    dom = Box(args.box) if args.box else _require_polygon(args)
    net = maximal_separated_net(dom, args.r, args.probe_step)
    _emit({"domain": dom.to_dict(), "net": net.to_dict(), "size": len(net),
           "min_distance": net.min_distance()}, args.out, _config(args))
    return 0


def cmd_partition(args) -> int:
    P = _require_polygon(args)
    step = args.probe_step if args.probe_step else args.r / 16
    net = maximal_separated_net(P, args.r, step)
    part = voronoi_partition(P, net)
    payload = {"domain": P.to_dict(), "sites": net.to_dict(),
               "cells": [c.to_dict() for c in part.cells], "diameters": part.diameters().tolist(),
               "multiplicity": part.multiplicity}
    code = 0
    if args.certify:
        cert, rep = V.certified_neumann_lower_bound(P, part, args.h)
        payload["certificate"] = cert.to_dict()
        payload["report"] = rep.to_dict()
        code = 0 if rep.passed else 1
    _emit(payload, args.out, _config(args))
    return code


CHECKS = ("polya", "closed-manifold", "dirichlet-monotonicity", "dm-ratio", "replay",
          "certificate", "keylemma", "boundary-concentration", "mixed-concentration",
          "bishop-gromov", "brunn-minkowski", "cheng")


def _run_check(args) -> list[V.CheckReport]:
    c = args.check
    if c == "polya":
        if args.torus:
            # tori are closed manifolds: the relevant proved bound is Li-Yau
            return [V.closed_manifold_check(args.torus, args.kmax)]
        if args.box:
            n, vol = len(args.box), float(np.prod(args.box))
            return [V.polya_check(analytic.box_spectrum(args.box, "NEUMANN", args.kmax + 1), n, vol, args.kmax)]
        if args.disk:
            s = analytic.disk_spectrum(args.disk, "NEUMANN", args.kmax + 1)
            return [V.polya_check(s, 2, math.pi * args.disk ** 2, args.kmax)]
        P = _require_polygon(args)
        est = V.fem_estimate(P, ALL_NEUMANN, args.h, args.kmax + 1)
        return [V.polya_check(est.coarse, 2, P.area, args.kmax, est.uncertainty[1:])]
    if c == "closed-manifold":
        if not args.torus:
            raise UsageError("closed-manifold needs --torus")
        return [V.closed_manifold_check(args.torus, args.kmax)]
    if c in ("dirichlet-monotonicity", "dm-ratio", "replay"):
        inner, outer = _require_polygon(args, "inner-"), _require_polygon(args, "outer-")
        if c == "dirichlet-monotonicity":
            return [V.dirichlet_monotonicity_check(inner, outer, args.kmax, args.h)]
        if c == "dm-ratio":
            return [V.dm_ratio(inner, outer, args.kmax, args.h)]
        return [V.replay_dm_proof(inner, outer, args.k, args.c, args.h)[1]]
    if c == "certificate":
        P = _require_polygon(args)
        net = maximal_separated_net(P, args.r, args.probe_step or args.r / 16)
        return [V.certified_neumann_lower_bound(P, voronoi_partition(P, net), args.h)[1]]
    if c == "keylemma":
        dom = Box(args.box) if args.box else _require_polygon(args)
        return [V.keylemma_constant(dom, args.r, args.probe_step, args.h)]
    if c == "boundary-concentration":
        return [V.boundary_concentration_check(_require_polygon(args), args.r, args.h)]
    if c == "mixed-concentration":
        P = _require_polygon(args)
        args.bc = "mixed" if args.neumann_edges else "dirichlet"
        return [V.mixed_concentration_check(P, _boundary(args, P), args.r, args.h,
                                            args.samples, args.seed)]
    if c == "bishop-gromov":
        if args.x is None or args.R is None:
            raise UsageError("bishop-gromov needs --x and --R")
        return [V.bishop_gromov_check(_require_polygon(args), args.x, args.r, args.R)]
    if c == "brunn-minkowski":
        return [V.brunn_minkowski_check(_require_polygon(args, "a-"), _require_polygon(args, "b-"), args.t)]
    if c == "cheng":
        return [V.cheng_ball_check(args.n, args.r)]
    raise UsageError(f"unknown check {c}")


def cmd_verify(args) -> int:
    if args.rerun:
        reports = [V.rerun(d) for d in io.read_jsonl(args.rerun)]
    elif args.check:
        reports = _run_check(args)
    else:
        raise UsageError("verify needs --check or --rerun")
    if args.out:
        io.write_jsonl(args.out, reports, _config(args))
    else:
        sys.stdout.write(json.dumps(io.header(_config(args)), sort_keys=True) + "\n")
        for r in reports:
            sys.stdout.write(r.to_json() + "\n")
    for r in reports:
        print(r.summary(), file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


def cmd_experiment(args) -> int:
    from . import acceptance
    from .experiment import run_corpus

    config = ExperimentConfig(seed=args.seed, pairs=args.pairs, kmax=args.kmax, h=args.h,
                              out=args.out, jobs=args.jobs)
    out = Path(args.out) if args.out else None
    if args.acceptance:
        crits = acceptance.run_all(config)
        passed = sum(c.passed for c in crits)
        print(f"{passed}/{len(crits)} criteria pass")
        if out:
            io.write_json(out / "acceptance.json", [c.to_dict() for c in crits], config.to_dict())
        return 0 if passed == len(crits) else 1
    result = run_corpus(config)
    summary = result.summary()
    if out:
        io.write_table(out / "dm_ratio.csv", result.RATIO_COLUMNS, result.ratio_rows(), config.to_dict())
        reports = [r for p in result.pairs for r in (p.ratio, p.dirichlet)] + result.replays
        io.write_jsonl(out / "reports.jsonl", reports, config.to_dict())
        io.write_json(out / "summary.json", summary, config.to_dict())
    else:
        sys.stdout.write(",".join(result.RATIO_COLUMNS) + "\n")
        for row in result.ratio_rows():
            sys.stdout.write(",".join(io._cell(v) for v in row) + "\n")
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    print(f"{result.seconds:.1f} s", file=sys.stderr)
    ok = summary["dirichlet_violations"] == 0 and summary["replays_pass"] and summary["identity_holds"]
    return 0 if ok else 1


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convexspec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"convexspec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", help="eigenvalues of a domain")
    _domain_args(s)
    s.add_argument("--bc", choices=("neumann", "dirichlet", "mixed"), default="neumann")
    s.add_argument("--neumann-edges", type=_floats, help="edge indices carrying Neumann data (mixed)")
    s.add_argument("--h", type=float, default=0.02)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("net", help="maximal separated net")
    _domain_args(s)
    s.add_argument("--r", type=float, required=True)
    s.add_argument("--probe-step", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_net)

    s = sub.add_parser("partition", help="Voronoi partition of a net, optionally certified")
    _domain_args(s)
    s.add_argument("--r", type=float, required=True)
    s.add_argument("--probe-step", type=float)
    s.add_argument("--certify", action="store_true")
    s.add_argument("--h", type=float, default=0.02)
    s.add_argument("--out")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("verify", help="run one inequality check (JSON lines)")
    s.add_argument("--check", choices=CHECKS)
    s.add_argument("--rerun", metavar="JSONL", help="re-run checks from a report file")
    _domain_args(s)
    for prefix in ("inner-", "outer-", "a-", "b-"):
        _domain_args(s, prefix)
    s.add_argument("--kmax", type=int, default=10)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--c", type=float, default=3.0)
    s.add_argument("--r", type=float, default=0.25)
    s.add_argument("--R", type=float)
    s.add_argument("--x", type=_floats)
    s.add_argument("--t", type=float, default=0.5)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--neumann-edges", type=_floats)
    s.add_argument("--probe-step", type=float)
    s.add_argument("--samples", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=V.MC_SEED)
    s.add_argument("--h", type=float, default=0.02)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify, bc="dirichlet")

    s = sub.add_parser("experiment", help="seeded nested-pair corpus, or --acceptance")
    s.add_argument("--acceptance", action="store_true", help="run all acceptance criteria")
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--pairs", type=int, default=50)
    s.add_argument("--kmax", type=int, default=10)
    s.add_argument("--h", type=float, default=0.02)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except V.NetTooLarge as exc:
        print(f"convexspec {args.command}: {exc}", file=sys.stderr)
        return 1
    except (UsageError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"convexspec {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"convexspec {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
