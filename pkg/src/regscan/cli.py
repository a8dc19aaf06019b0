"""Command-line front end: reproducible pipelines over field files.

Every command emits a Report: a JSON document with the command kind, the
numeric payload, and a RunManifest recording the exact configuration
hash, input file hashes, tool version, and wall time. Identical
manifests imply byte-identical reports (keys are sorted, floats use
repr), so runs are auditable.

Commands: norms, scan, localize, stokes-check, simulate, count-bound,
report. REGSCAN_THREADS caps FFT parallelism.
"""

import argparse
import dataclasses
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from .dyadic import count_bound, localize
from .fieldio import FieldFormatError, read_field, write_field
from .grid import Ball, Cube, Cylinder
from .localquant import AnalysisConfig, quant_report
from .lorentz import NormReport, l4_interpolation_check, local_l2_check, weak_norm
from .stokes import (
    BumpTestFunction,
    StokesError,
    estar,
    harmonic_residual,
    local_energy_residual,
    pressure_parts,
    restrict_to_cube,
)
from .synth import SolverConfig, SolverError, run_solver

SCHEMA_VERSION = 1


def _jsonable(obj):
    """Coerce numpy scalars/arrays and containers to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _manifest(kind, args_dict, inputs, outputs, wall):
    config = json.dumps(_jsonable(args_dict), sort_keys=True)
    return {
        "command": kind,
        "config_hash": hashlib.sha256(config.encode()).hexdigest(),
        "config": json.loads(config),
        "inputs": {p: _sha256(p) for p in inputs},
        "version": __version__,
        "wall_time_s": wall,
        "outputs": list(outputs),
    }


def _floats(text, what, count):
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} holds a non-numeric value: {text!r}")
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"{what} needs {count} comma-separated values")
    return parts


def _triple(text, what):
    return tuple(_floats(text, what, 3))


def _quad(text, what):
    return _floats(text, what, 4)


def _pick_frame(field, args):
    if getattr(args, "frame", None) is not None:
        if not (0 <= args.frame < len(field.frames)):
            raise ValueError(f"frame {args.frame} out of range")
        return args.frame
    if getattr(args, "time", None) is not None:
        return field.frame_index_at(args.time)
    return len(field.frames) - 1


# -- command payloads -----------------------------------------------------------


def cmd_norms(args):
    field = read_field(args.field)
    i = _pick_frame(field, args)
    mag = field.frames[i].magnitude()
    report = NormReport.from_scalar(mag, q=args.q, r=args.r)
    payload = report.to_dict()
    payload["frame"] = i
    payload["time"] = float(field.times[i])
    if args.M is not None:
        M = report.weak if args.M == "auto" else float(args.M)
        payload["l4_interpolation"] = l4_interpolation_check(mag, M).to_dict()
        ball = Ball(
            tuple(0.5 * (lo + hi) for lo, hi in zip(mag.box.lo, mag.box.hi)),
            0.25 * min(mag.box.extent),
        )
        payload["local_l2"] = local_l2_check(mag, ball, M).to_dict()
    return "norms", payload, [args.field]


def cmd_scan(args):
    field = read_field(args.field)
    cfg = AnalysisConfig(eps=args.eps, zeta=args.zeta)
    cyl = Cylinder(center=args.x0, t0=args.t0, r=args.r)
    report = quant_report(field, cyl, cfg)
    return "scan", report.to_dict(), [args.field]


def cmd_localize(args):
    field = read_field(args.field)
    i = _pick_frame(field, args)
    cfg = AnalysisConfig(eps=args.eps)
    M = None if args.M == "auto" else float(args.M)
    cs = localize(
        field.frames[i],
        cfg,
        args.kmax,
        M=M,
        eps_shape_factor=args.eps_shape_factor,
        on_underresolved=args.on_underresolved,
    )
    payload = cs.to_dict()
    payload["frame"] = i
    payload["time"] = float(field.times[i])
    return "localize", payload, [args.field]


def cmd_stokes_check(args):
    field = read_field(args.field)
    i = _pick_frame(field, args)
    cube = Cube(corner=tuple(args.cube[:3]), side=args.cube[3])
    u = restrict_to_cube(field.frames[i], cube)
    parts = pressure_parts(u, tol=args.tol)
    sol_h = parts.solutions["ph"]

    # reapply the projection to its own gradient: the face-level residual
    # isolates solver error from grid-transfer error
    again = estar(sol_h, tol=args.tol)
    num = np.sqrt(sum(
        float(((a - b) ** 2).sum())
        for a, b in zip(again._face_grad, sol_h._face_grad)
    ))
    den = np.sqrt(sum(float((g ** 2).sum()) for g in sol_h._face_grad))

    unorm = float(np.sqrt((u.stack() ** 2).sum()))
    payload = {
        "cube": {"corner": list(cube.corner), "side": cube.side},
        "frame": i,
        "time": float(field.times[i]),
        "iterations": {k: s.iterations for k, s in parts.solutions.items()},
        "residuals": {k: s.residuals for k, s in parts.solutions.items()},
        "harmonic_residual": harmonic_residual(sol_h, u),
        "projection_residual": num / den if den > 0 else 0.0,
        "gradp_over_f": (
            float(np.sqrt((parts.grad_ph.stack() ** 2).sum())) / unorm
            if unorm > 0 else 0.0
        ),
    }
    if args.bump is not None:
        vals = [float(v) for v in args.bump.split(",")]
        if len(vals) != 6:
            raise ValueError("--bump needs cx,cy,cz,R,t_center,t_radius")
        phi = BumpTestFunction(tuple(vals[:3]), vals[3], vals[4], vals[5])
        payload["energy"] = local_energy_residual(field, cube, phi, tol=args.tol)
    return "stokes", payload, [args.field]


def cmd_simulate(args):
    with open(args.config) as fh:
        raw = json.load(fh)
    known = {f.name for f in dataclasses.fields(SolverConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    try:
        cfg = SolverConfig(**raw)
    except TypeError as exc:
        raise ValueError(f"invalid config: {exc}") from exc
    run = run_solver(cfg)
    write_field(args.out, run.field)
    payload = {
        "config": _jsonable(vars(cfg)),
        "frames": len(run.field.frames),
        "energy_initial": float(run.energy[0]),
        "energy_final": float(run.energy[-1]),
        "energy_balance_residual": run.energy_balance_residual(),
        "max_cfl": float(run.cfl.max()),
        "field": args.out,
        "field_sha256": _sha256(args.out),
    }
    return "simulate", payload, [args.config]


def cmd_count_bound(args):
    bound = count_bound(args.M, args.eps)
    payload = {"M": args.M, "eps": args.eps, "bound": bound}
    if bound == int(bound):
        payload["bound_int"] = int(bound)
    return "count-bound", payload, []


def cmd_report(args):
    ok = True
    for path in args.reports:
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("schema_version") != SCHEMA_VERSION:
            print(f"{path}: unsupported schema {doc.get('schema_version')}")
            ok = False
            continue
        man = doc.get("manifest", {})
        print(f"{path}: kind={doc.get('kind')} version={man.get('version')} "
              f"config={man.get('config_hash', '')[:12]}")
        for key, val in sorted(doc.get("payload", {}).items()):
            if isinstance(val, (int, float, str, bool)):
                print(f"  {key} = {val}")
    if not ok:
        raise ValueError("one or more reports failed validation")
    return None


# -- argument parsing -----------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="regscan",
        description="local regularity analysis of discretized velocity fields",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true",
                       help="print the full JSON report")
        p.add_argument("--out", help="write the JSON report to this path")

    p = sub.add_parser("norms", help="weak/equivalent/Lp norms of |u|")
    p.add_argument("field")
    p.add_argument("--q", type=float, default=3.0)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--frame", type=int)
    p.add_argument("--time", type=float)
    p.add_argument("--M", help="'auto' or a number: also run the "
                   "interpolation checks against this weak-norm bound")
    common(p)
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("scan", help="scaling-invariant quantities on a cylinder")
    p.add_argument("field")
    p.add_argument("--x0", type=lambda s: _triple(s, "--x0"), required=True)
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--zeta", type=float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("localize", help="nested-cube singularity localization")
    p.add_argument("field")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--M", default="auto")
    p.add_argument("--eps-shape-factor", type=float, default=1.0,
                   dest="eps_shape_factor")
    p.add_argument("--on-underresolved", choices=("error", "warn"),
                   default="error", dest="on_underresolved")
    p.add_argument("--frame", type=int)
    p.add_argument("--time", type=float)
    common(p)
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("stokes-check", help="pressure projection diagnostics")
    p.add_argument("field")
    p.add_argument("--cube", type=lambda s: _quad(s, "--cube"),
                   required=True, metavar="X,Y,Z,SIDE")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--frame", type=int)
    p.add_argument("--time", type=float)
    p.add_argument("--bump", help="test function cx,cy,cz,R,t_center,t_radius "
                   "for the local energy balance")
    common(p)
    p.set_defaults(func=cmd_stokes_check)

    p = sub.add_parser("simulate", help="run the periodic solver")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output field file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--report", dest="report_out",
                   help="write the JSON report to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("count-bound", help="candidate-count bound")
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_count_bound)

    p = sub.add_parser("report", help="validate and summarize saved reports")
    p.add_argument("reports", nargs="+")
    p.set_defaults(func=cmd_report)

    return parser


_SUMMARY_KEYS = {
    "norms": ("weak_norm", "equivalent_norm", "ratio", "ratio_bound"),
    "scan": ("q3", "q3_small", "energy_sup"),
    "localize": ("n_clusters", "regular", "M", "bound"),
    "stokes": ("harmonic_residual", "projection_residual"),
    "simulate": ("frames", "energy_balance_residual", "max_cfl"),
    "count-bound": ("bound",),
}


def _fail(exc):
    print(json.dumps({"error": str(exc), "type": type(exc).__name__}),
          file=sys.stderr)
    return 1


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        result = args.func(args)
    except (FieldFormatError, SolverError, StokesError, ValueError, OSError) as exc:
        return _fail(exc)
    if result is None:                      # report command prints directly
        return 0

    kind, payload, inputs = result
    wall = time.perf_counter() - started
    out_path = getattr(args, "out", None) if kind != "simulate" else None
    report_out = getattr(args, "report_out", None) or out_path
    outputs = [p for p in (report_out,
                           args.out if kind == "simulate" else None) if p]
    arg_items = {
        k: v for k, v in vars(args).items()
        if k not in ("func", "json", "out", "report_out") and v is not None
    }
    doc = {
        "kind": kind,
        "schema_version": SCHEMA_VERSION,
        "payload": _jsonable(payload),
        "manifest": _manifest(kind, arg_items, inputs, outputs, wall),
    }
    text = json.dumps(doc, sort_keys=True, indent=2)
    if report_out:
        try:
            with open(report_out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            return _fail(exc)
    if args.json:
        print(text)
    else:
        print(f"regscan {kind}")
        for key in _SUMMARY_KEYS.get(kind, ()):
            if key in doc["payload"]:
                print(f"  {key} = {doc['payload'][key]}")
        if report_out:
            print(f"  report written to {report_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
