"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

import numpy as np

from . import generators as gen
from .cloud import DEFAULT_TAU_LINE, DEFAULT_TAU_RANK, PointCloud, default_h, stratify
from .cones import fullness, simplex_volume
from .errors import ReachkitError
from .grassmann import gap_distance, gj_norm, orthonormalize
from .io import atomic_write, cloud_to_csv, cloud_to_dict, dumps, fmt, read_cloud, read_json, write_json
from .lipschitz import CONSTANTS, lipschitz_check, tdmnapl_data, whitney_check
from .prodint import AtomicIntervalFunction, domination_bound, product_integral_atomic, product_integral_partition
from .reach import METHODS, default_r_grid, federer_reach, midpoint_reach, projection_uniqueness_reach


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return x


def _nonneg(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return x


def _count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return n


def _json_arg(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc.msg}") from None


# ---------------------------------------------------------------- output

def _tsv(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, (list, tuple)):
            cell = ",".join(_cell(v) for v in value)
        else:
            cell = _cell(value)
        lines.append(f"{key}\t{cell}")
    return "\n".join(lines) + "\n"


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return json.dumps(v)
    return str(v)


def _emit(report: dict, args: argparse.Namespace) -> None:
    text = _tsv(report) if getattr(args, "format", "json") == "tsv" else dumps(report)
    if args.output:
        atomic_write(args.output, text)
    else:
        sys.stdout.write(text)


def _emit_cloud(cloud: PointCloud, args: argparse.Namespace) -> None:
    as_json = bool(args.output) and args.output.endswith(".json")
    text = dumps(cloud_to_dict(cloud)) if as_json else cloud_to_csv(cloud)
    if args.output:
        atomic_write(args.output, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def cmd_generate(args: argparse.Namespace) -> None:
    kind = args.kind
    if kind == "circle":
        cloud = gen.circle(args.radius, args.n).cloud
    elif kind == "sphere":
        cloud = gen.sphere(args.radius, args.n).cloud
    elif kind == "segment":
        cloud = gen.segment(args.length, args.n, args.dim).cloud
    elif kind == "doubleton":
        cloud = gen.doubleton(args.h, args.dim).cloud
    elif kind == "convex-polygon":
        cloud = gen.convex_polygon(args.side, args.n).cloud
    elif kind == "bset":
        spec = gen.BSetSpec.from_dict(read_json(args.spec))
        sample = gen.make_bset(spec, args.grid_step, args.dim)
        cloud = sample.cloud
        if args.contact_output:
            write_json({"contact": [list(c) for c in sample.contact]}, args.contact_output)
    elif kind == "multirotate":
        spec = gen.MultirotationSpec.from_dict(read_json(args.spec))
        cloud = gen.apply_multirotation(spec, read_cloud(args.input))
    else:  # example-m
        m = gen.example_M(args.r, args.contact, args.angles, args.grid_step, args.kappa)
        cloud = m.cloud
        if args.contact_output:
            write_json({"contact": [list(c) for c in m.contact]}, args.contact_output)
    _emit_cloud(cloud, args)


def cmd_reach(args: argparse.Namespace) -> None:
    cloud = read_cloud(args.input)
    if args.method == "federer":
        est = federer_reach(cloud, args.h, args.tau_rank, args.h_min, seed=args.seed)
    elif args.method == "midpoint":
        est = midpoint_reach(cloud, args.h_min, args.eps_zero, seed=args.seed)
    else:
        grid = default_r_grid(cloud, args.grid_step) if len(cloud) > 1 else None
        est = projection_uniqueness_reach(
            cloud, args.probe_count, grid, h_min=args.h_min, seed=args.seed
        )
    _emit(
        {
            "method": est.method,
            "value": est.value,
            "witness": list(est.witness) if est.witness else None,
            "pairs_used": est.pairs_used,
            "h_min": est.min_pair_distance,
            "warnings": list(est.warnings),
        },
        args,
    )


def cmd_stratify(args: argparse.Namespace) -> None:
    cloud = read_cloud(args.input)
    h = args.h if args.h is not None else default_h(cloud)
    labelled = stratify(cloud, h, args.tau_rank, args.tau_line, args.declared_dim)
    if labelled.flagged:
        print(f"reachkit: {len(labelled.flagged)} points exceed the declared dimension", file=sys.stderr)
    if args.summary:
        counts: dict[str, int] = {}
        for lab in labelled.labels:
            key = f"{lab.k},{'true' if lab.full_span else 'false'}"
            counts[key] = counts.get(key, 0) + 1
        write_json({"h": h, "counts": dict(sorted(counts.items())), "flagged": list(labelled.flagged)}, args.summary)
    _emit_cloud(labelled, args)


def _subspace(vectors: Any, what: str):
    try:
        arr = np.asarray(vectors, dtype=float)
    except (TypeError, ValueError):
        raise ReachkitError(f"{what} must be a list of vectors") from None
    if arr.ndim != 2:
        raise ReachkitError(f"{what} must be a list of vectors")
    return orthonormalize(arr)


def cmd_gap(args: argparse.Namespace) -> None:
    u = _subspace(args.u, "--u")
    v = _subspace(args.v, "--v")
    _emit({"gap": gap_distance(u, v), "dim_u": u.dim, "dim_v": v.dim}, args)


def cmd_fullness(args: argparse.Namespace) -> None:
    if args.input:
        verts = read_cloud(args.input).points
    elif args.vertices is not None:
        verts = np.asarray(args.vertices, dtype=float)
    else:
        raise ReachkitError("give the simplex with --vertices or --input")
    _emit({"fullness": fullness(verts), "volume": simplex_volume(verts), "k": int(verts.shape[0]) - 1}, args)


def cmd_prodint(args: argparse.Namespace) -> None:
    f = AtomicIntervalFunction.from_dict(read_json(args.spec))
    if args.action == "eval":
        if args.mesh is not None:
            mu = product_integral_partition(f, args.s, args.t, args.mesh)
        else:
            mu = product_integral_atomic(f, args.s, args.t)
        _emit({"s": args.s, "t": args.t, "mu": mu.tolist()}, args)
    else:
        mu = product_integral_atomic(f, args.s, args.t)
        gap = gj_norm(mu - np.eye(f.dim))
        bound = domination_bound(f, args.s, args.t)
        _emit({"s": args.s, "t": args.t, "gj_deviation": gap, "bound": bound, "satisfied": gap <= bound * (1 + 1e-12)}, args)


def cmd_lipcheck(args: argparse.Namespace) -> None:
    cloud = read_cloud(args.input)
    if cloud.labels is None:
        cloud = stratify(cloud, args.h, args.tau_rank, args.tau_line)
    report = lipschitz_check(
        cloud, args.k, args.h, args.name, args.r, args.theta, args.h_min, args.tau_rank
    )
    _emit(report.to_dict(), args)


def cmd_whitney(args: argparse.Namespace) -> None:
    if args.input:
        data = read_json(args.input)
        try:
            domain, f, phi = data["domain"], data["f"], data["phi"]
        except (KeyError, TypeError):
            raise ReachkitError(f"{args.input}: expected keys domain, f and phi") from None
        try:
            c = whitney_check(np.asarray(domain, float), np.asarray(f, float), np.asarray(phi, float))
        except ValueError as exc:
            raise ReachkitError(f"{args.input}: {exc}") from None
        _emit({"c": c, "points": len(domain)}, args)
        return
    if not args.cloud or args.k is None or args.h is None:
        raise ReachkitError("give --input data.json, or --cloud with --k and --h")
    cloud = read_cloud(args.cloud)
    if cloud.labels is None:
        cloud = stratify(cloud, args.h, args.tau_rank, args.tau_line)
    data = tdmnapl_data(cloud, args.k, args.h, args.tau_rank)
    c = whitney_check(data.domain, data.f, data.phi)
    _emit({"c": c, "points": int(data.indices.size), "base": int(data.indices[0])}, args)


# ---------------------------------------------------------------- parser

def _add_output(p: argparse.ArgumentParser, report: bool = True) -> None:
    p.add_argument("-o", "--output", help="write here instead of stdout (atomically)")
    if report:
        p.add_argument("--format", choices=("json", "tsv"), default="json")


def _add_tangent(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau-rank", type=_positive, default=DEFAULT_TAU_RANK)
    p.add_argument("--tau-line", type=_positive, default=DEFAULT_TAU_LINE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reachkit", description="Reach estimation and stratification for point clouds.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    g = sub.add_parser("generate", help="write a fixture point cloud as CSV")
    gsub = g.add_subparsers(dest="kind", required=True, metavar="KIND")
    p = gsub.add_parser("circle")
    p.add_argument("--radius", type=_positive, default=1.0)
    p.add_argument("--n", type=_count, default=256)
    p = gsub.add_parser("sphere")
    p.add_argument("--radius", type=_positive, default=1.0)
    p.add_argument("--n", type=_count, default=400)
    p = gsub.add_parser("segment")
    p.add_argument("--length", type=_positive, default=1.0)
    p.add_argument("--n", type=_count, default=101)
    p.add_argument("--dim", type=_count, default=2)
    p = gsub.add_parser("doubleton")
    p.add_argument("--h", type=_positive, default=0.3)
    p.add_argument("--dim", type=_count, default=2)
    p = gsub.add_parser("convex-polygon")
    p.add_argument("--side", type=_positive, default=1.0)
    p.add_argument("--n", type=_count, default=10)
    p = gsub.add_parser("bset")
    p.add_argument("--spec", required=True, help="B-set JSON spec")
    p.add_argument("--grid-step", type=_positive, default=0.02)
    p.add_argument("--dim", type=_count, default=2)
    p.add_argument("--contact-output", help="also write the contact set as JSON")
    p = gsub.add_parser("multirotate")
    p.add_argument("--spec", required=True, help="multirotation JSON spec")
    p.add_argument("-i", "--input", required=True)
    p = gsub.add_parser("example-m")
    p.add_argument("--r", type=_positive, default=1.0)
    p.add_argument("--contact", type=_json_arg, default=[[0.0, 0.0]], help='JSON list such as "[[0,0],[0.5,0.5]]"')
    p.add_argument("--angles", type=_json_arg, default=[], help="JSON list with one angle per leaf")
    p.add_argument("--grid-step", type=_positive, default=0.02)
    p.add_argument("--kappa", type=_positive, default=1.0)
    p.add_argument("--contact-output", help="also write the contact set as JSON")
    for p in gsub.choices.values():
        _add_output(p, report=False)
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("reach", help="estimate the reach of a cloud")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--h", type=_positive)
    p.add_argument("--h-min", type=_positive)
    p.add_argument("--tau-rank", type=_positive, default=DEFAULT_TAU_RANK)
    p.add_argument("--eps-zero", type=_nonneg)
    p.add_argument("--probe-count", type=_count, default=4096)
    p.add_argument("--grid-step", type=_positive, default=0.02, help="radius grid step for --method projection")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("stratify", help="label points by tangent dimension")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--h", type=_positive)
    _add_tangent(p)
    p.add_argument("--declared-dim", type=int)
    p.add_argument("--summary", help="write label counts and flagged points as JSON")
    _add_output(p, report=False)
    p.set_defaults(func=cmd_stratify)

    p = sub.add_parser("gap", help="gap distance between two spans")
    p.add_argument("--u", type=_json_arg, required=True, help="JSON list of spanning vectors")
    p.add_argument("--v", type=_json_arg, required=True, help="JSON list of spanning vectors")
    _add_output(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("fullness", help="fullness of a simplex")
    p.add_argument("--vertices", type=_json_arg, help="JSON list of vertices")
    p.add_argument("-i", "--input", help="CSV of vertices")
    _add_output(p)
    p.set_defaults(func=cmd_fullness)

    p = sub.add_parser("prodint", help="product integral of an atomic interval function")
    p.add_argument("action", choices=("eval", "bound"))
    p.add_argument("--spec", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--mesh", type=_positive, help="use a uniform partition product instead of the atomic one")
    _add_output(p)
    p.set_defaults(func=cmd_prodint)

    p = sub.add_parser("lipcheck", help="tangent-field Lipschitz constant against a named bound")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--k", type=_count, required=True)
    p.add_argument("--h", type=_positive, required=True)
    p.add_argument("--name", choices=CONSTANTS, required=True)
    p.add_argument("--r", type=_positive, required=True)
    p.add_argument("--theta", type=_positive)
    p.add_argument("--h-min", type=_nonneg, default=0.0)
    _add_tangent(p)
    _add_output(p)
    p.set_defaults(func=cmd_lipcheck)

    p = sub.add_parser("whitney", help="minimal first-order Whitney constant")
    p.add_argument("-i", "--input", help="JSON with domain, f and phi")
    p.add_argument("--cloud", help="CSV cloud; builds the data from a stratum")
    p.add_argument("--k", type=_count)
    p.add_argument("--h", type=_positive)
    _add_tangent(p)
    _add_output(p)
    p.set_defaults(func=cmd_whitney)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except ReachkitError as exc:
        print(f"reachkit: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
