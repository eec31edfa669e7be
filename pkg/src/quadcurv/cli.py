"""Command-line front end.

Metric files are JSON documents::

    {"format": 1, "labels": ["p", "x", "y", "z"], "distances": [[0, 1, ...], ...]}

Reports go to stdout as JSON with floats at 12 significant digits.
Exit codes: 0 pass, 1 condition or embedding failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import conditions as cond
from .embedding import embed_any
from .experiments import (
    FALSIFYING,
    reproduce_counterexample,
    run_positivity,
    run_violation_search,
    space_to_dict,
)
from .iteration import DEFAULT_N_MAX, UnsupportedSpace, XEqualsZ, run_iteration, verify_recursion
from .metric_core import MetricError, counterexample_F, validate
from .model_geometry import (
    Euclidean,
    EuclideanCone,
    GeometryError,
    Hyperbolic,
    Sphere,
)

FORMAT_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _round(obj):
    if isinstance(obj, float):
        return obj if not math.isfinite(obj) else float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return obj


def emit(report: dict, out=None) -> None:
    out = out or sys.stdout
    json.dump(_round(report), out, indent=2, sort_keys=False)
    out.write("\n")


def read_metric_file(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("metric file must be a JSON object")
    if doc.get("format", FORMAT_VERSION) != FORMAT_VERSION:
        raise InputError(f"unsupported format {doc.get('format')!r}")
    for key in ("labels", "distances"):
        if key not in doc:
            raise InputError(f"metric file lacks {key!r}")
    try:
        return validate(doc["distances"], doc["labels"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MetricError):
            raise
        raise InputError(f"bad distances array: {exc}") from exc


def write_metric_file(path: str, space) -> None:
    with open(path, "w") as fh:
        json.dump(space.to_dict(), fh, indent=2)
        fh.write("\n")


def _error_report(exc: Exception) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("i", "j", "k"):
        if hasattr(exc, attr):
            out[attr] = getattr(exc, attr)
    return out


def _default_seed() -> int:
    return int(os.environ.get("QUADCURV_SEED", "0"))


def _space_from_args(args):
    if args.space == "euclidean":
        return Euclidean(args.dim)
    if args.space == "sphere":
        return Sphere(args.radius if args.radius is not None else 1.0)
    if args.space == "hyperbolic":
        return Hyperbolic(args.kappa)
    if args.space == "cone":
        return EuclideanCone(args.theta * math.pi)
    raise InputError(f"unknown space {args.space!r}")


def _radius_bound(args):
    if args.radius_bound is not None:
        return args.radius_bound
    if args.space == "hyperbolic":
        # for hyperbolic space --radius means the sampling radius
        return args.radius if args.radius is not None else 1.0
    return None


def cmd_check(args) -> int:
    space = read_metric_file(args.path)
    report = cond.check_all_labelings(space, args.kappa, args.tol)
    out = report.to_dict()
    out["passed"] = report.passed
    emit(out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_embed(args) -> int:
    space = read_metric_file(args.path)
    res = embed_any(space)
    out = res.to_dict()
    out["labels"] = list(space.labels)
    emit(out)
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_sample(args) -> int:
    space = _space_from_args(args)
    keep = args.csv is not None
    if isinstance(space, Hyperbolic):
        camp = run_violation_search(
            space, args.count, args.seed, _radius_bound(args), args.tol, keep_residuals=keep
        )
    else:
        camp = run_positivity(
            space, args.count, args.seed, args.conditions or None, _radius_bound(args),
            args.tol, keep_residuals=keep,
        )
    emit(camp.to_dict())
    if keep:
        write_histograms(args.csv, camp, args.bins)
    if camp.status == FALSIFYING and space.nonnegatively_curved:
        return EXIT_FAIL
    return EXIT_OK


def write_histograms(path: str, camp, bins: int = 50) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["condition", "bin_lo", "bin_hi", "count"])
        for c in camp.conditions:
            r = camp.residual_array(c)
            if r.size == 0:
                continue
            counts, edges = np.histogram(r, bins=bins)
            for n, lo, hi in zip(counts, edges[:-1], edges[1:]):
                w.writerow([c, f"{lo:.12g}", f"{hi:.12g}", int(n)])


def _coords(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise InputError(f"bad coordinate list {text!r}") from exc


def cmd_iterate(args) -> int:
    space = _space_from_args(args)
    pts = [_coords(v) for v in (args.p, args.q, args.x)]
    for name, v in zip("pqx", pts):
        try:
            space.check_point(v)
        except GeometryError as exc:
            raise InputError(f"point {name}: {exc}") from exc
        if float(space.constraint_error(v)) > 1e-9 * max(1.0, float(np.max(np.abs(v)))):
            raise InputError(f"point {name} does not lie on {space!r}")
    trace = run_iteration(space, *pts, n_max=args.n_max)
    out = trace.to_dict()
    out["space"] = space_to_dict(space)
    ok_rec = verify_recursion(trace, args.rec_tol) if len(trace.steps) > 1 else []
    star2, star3 = trace.midpoint_residuals(0)
    out["columns"] = [
        {
            "n": s.n,
            "alpha": s.alpha,
            "alpha_le_3": s.alpha <= 3 + args.rec_tol,
            "recursion_ok": ok_rec[s.n] if s.n < len(ok_rec) else None,
        }
        for s in trace.steps
    ]
    out["midpoint_residual_n0"] = star2
    out["weak_midpoint_residual_n0"] = star3
    emit(out)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    if args.write:
        write_metric_file(args.write, counterexample_F(args.eps[0]))
    rows = reproduce_counterexample(args.eps, args.tol)
    emit({"counterexample": rows})
    bad = [r for r in rows if r["in_admissible_range"] and not r["expected"]]
    return EXIT_FAIL if bad else EXIT_OK


def _add_space_args(p):
    p.add_argument("--space", choices=["euclidean", "sphere", "hyperbolic", "cone"], default="sphere")
    p.add_argument("--dim", type=int, default=2, help="Euclidean dimension")
    p.add_argument("--radius", type=float, default=None,
                   help="sphere radius; for hyperbolic space, the sampling radius")
    p.add_argument("--radius-bound", type=float, default=None, help="sampling radius bound")
    p.add_argument("--kappa", type=float, default=-1.0, help="hyperbolic curvature")
    p.add_argument("--theta", type=float, default=2.0, help="cone angle in units of pi")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadcurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=cond.DEFAULT_TOL)

    p = sub.add_parser("check", help="evaluate every condition on every labeling")
    p.add_argument("path")
    p.add_argument("--kappa", type=float, default=0.0, help="curvature of the model angles")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("embed", help="embed a 4-point metric into the plane or a sphere")
    p.add_argument("path")
    # embedding uses its own scale-relative eigenvalue thresholds
    common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("sample", help="Monte Carlo campaign on a model space")
    _add_space_args(p)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--conditions", nargs="*", choices=list(cond.CONDITIONS))
    p.add_argument("--csv", default=None, help="write residual histograms here")
    p.add_argument("--bins", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("iterate", help="trace the thirds-sequence toward a midpoint")
    _add_space_args(p)
    p.add_argument("--p", required=True, help="comma-separated coordinates")
    p.add_argument("--q", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.add_argument("--rec-tol", type=float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("counterexample", help="evaluate the four-point counterexample")
    p.add_argument("--eps", type=float, nargs="+", default=[0.01, 0.1])
    p.add_argument("--write", default=None, help="also write the metric for the first eps")
    common(p)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "seed", "unset") is None:
        args.seed = _default_seed()
    if args.tol < 0:
        emit({"error": "InputError", "message": "--tol must be non-negative"})
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, MetricError, XEqualsZ, UnsupportedSpace, GeometryError, ValueError) as exc:
        emit(_error_report(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
