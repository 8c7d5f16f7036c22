"""Command-line front end: every operation as a reproducible subcommand.

All artifacts are pure functions of the flags: no timestamps, no
environment lookups, and --workers never changes bytes.  Outputs embed
the effective configuration (version, seed where one is used, tolerance
scales).  JSON floats rely on repr, the shortest round-trip form, so
values re-read losslessly.

Exit codes: 0 success, 2 usage or parse error, 3 domain error
(degenerate shape, inadmissible family, depth cap), 4 numeric failure
(identity violation, singular interior block).
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import sys
from typing import Callable

from . import __version__
from . import shape as shape_mod
from .action import (ActionFamily, RGStepBreakdown, assemble_subdivided,
                     constant_family, cotangent_action, cotangent_family,
                     fixed_point_residual, interpolant_energy,
                     projective_residual, quadrature_energy, rg_step)
from .errors import DOMAIN_ERRORS, NUMERIC_ERRORS
from .schur import verify_hierarchical
from .shape import (CotangentVector, HalfPlanePoint, cot_from_angles,
                    cot_from_coords, flatness, from_halfplane,
                    identity_residual, to_halfplane, to_minkowski)
from .subdivide import build_mesh, flow_csv, random_flow

# z of the equilateral triangle on the standard base (0,0)-(1,0).
EQUILATERAL_Z = "0.5,0.8660254037844386"


def _floats(text: str, n: int, flag: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != n:
        raise ValueError(f"{flag} needs {n} comma-separated numbers, "
                         f"got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"{flag}: could not parse {text!r}") from None


def _config(seed: int | None = None) -> dict:
    cfg = {"version": __version__}
    if seed is not None:
        cfg["seed"] = seed
    cfg["identity_tol_scale"] = shape_mod.IDENTITY_TOL_SCALE
    cfg["degenerate_area_rel"] = shape_mod.DEGENERATE_AREA_REL
    return cfg


def _config_lines(seed: int | None = None, **extra) -> list[str]:
    lines = [f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}"
             for k, v in extra.items()]
    return [f"version={__version__}"] + lines + (
        [f"seed={seed}"] if seed is not None else []) + [
        f"identity_tol_scale={shape_mod.IDENTITY_TOL_SCALE!r}",
        f"degenerate_area_rel={shape_mod.DEGENERATE_AREA_REL!r}",
    ]


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _emit_json(payload: dict, out: str | None) -> None:
    # allow_nan=False: invalid JSON must never leave the process
    _emit(json.dumps(payload, indent=2, allow_nan=False) + "\n", out)


# ---------------------------------------------------------------------------
# custom family expressions

_EXPR_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div)
_EXPR_NAMES = ("a0", "a1", "a2")


def _check_expr(node: ast.AST, src: str) -> None:
    if isinstance(node, ast.BinOp) and isinstance(node.op, _EXPR_BINOPS):
        _check_expr(node.left, src)
        _check_expr(node.right, src)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        _check_expr(node.operand, src)
    elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        pass
    elif isinstance(node, ast.Name) and node.id in _EXPR_NAMES:
        pass
    else:
        raise ValueError(
            f"family expression {src!r}: only a0, a1, a2, numbers, "
            "+ - * / and parentheses are allowed")


def compile_coeff(src: str) -> Callable[[CotangentVector], float]:
    """Compile a coefficient expression in a0, a1, a2.

    Grammar: the three variables, numeric literals, binary + - * /,
    unary minus, parentheses.  Anything else is rejected before
    evaluation.
    """
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"family expression {src!r}: {exc.msg}") from None
    _check_expr(tree.body, src)
    code = compile(tree, "<family>", "eval")

    def coeff(a: CotangentVector) -> float:
        scope = {"a0": a.a0, "a1": a.a1, "a2": a.a2}
        return float(eval(code, {"__builtins__": {}}, scope))

    return coeff


def family_from_args(args) -> ActionFamily:
    if args.family == "cotangent":
        return cotangent_family()
    if args.family == "constant":
        p, q = _floats(args.pq, 2, "--pq")
        return constant_family(p, q)
    if args.p_expr is None or args.q_expr is None:
        raise ValueError("--family custom needs both --P and --Q expressions")
    return ActionFamily("custom", compile_coeff(args.p_expr),
                        compile_coeff(args.q_expr))


def _add_family_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=("cotangent", "constant", "custom"),
                        default="cotangent")
    parser.add_argument("--pq", default="0.5,-0.5", metavar="P,Q",
                        help="constant-family coefficients (default 0.5,-0.5)")
    parser.add_argument("--P", dest="p_expr", metavar="EXPR",
                        help="custom-family P, e.g. '(a1 + a2) / 4'")
    parser.add_argument("--Q", dest="q_expr", metavar="EXPR",
                        help="custom-family Q, e.g. '-a0 / 2'")


def _parse_z(text: str) -> HalfPlanePoint:
    re, im = _floats(text, 2, "--z")
    return HalfPlanePoint(re, im)


# ---------------------------------------------------------------------------
# subcommands

def cmd_shape(args) -> None:
    given = [v is not None for v in (args.coords, args.angles, args.z)]
    if sum(given) != 1:
        raise ValueError("give exactly one of --coords, --angles, --z")
    if args.coords is not None:
        c = _floats(args.coords, 6, "--coords")
        a = cot_from_coords((c[0], c[1]), (c[2], c[3]), (c[4], c[5]))
    elif args.angles is not None:
        degs = _floats(args.angles, 3, "--angles")
        a = cot_from_angles(*(math.radians(t) for t in degs))
    else:
        a = from_halfplane(_parse_z(args.z))
    z = to_halfplane(a)
    p = to_minkowski(a)
    _emit_json({
        "a": list(a.astuple()),
        "z": [z.re, z.im],
        "p": list(p.astuple()),
        "flatness": flatness(a),
        "identity_residual": identity_residual(a),
        "config": _config(),
    }, args.out)


def cmd_subdivide(args) -> None:
    z = _parse_z(args.z)
    mesh = build_mesh((0.0, 0.0), (1.0, 0.0), (z.re, z.im), args.levels)
    payload = mesh.to_json_dict()
    payload["config"] = _config()
    _emit_json(payload, args.out)


def cmd_flow(args) -> None:
    a = from_halfplane(_parse_z(args.z))
    stats = random_flow(a, args.steps, args.samples, args.seed,
                        workers=args.workers)
    lines = _config_lines(seed=args.seed, command="flow", z=args.z,
                          steps=args.steps, samples=args.samples)
    _emit(flow_csv(stats, lines), args.out)


def _breakdown_dict(b: RGStepBreakdown) -> dict:
    return {
        "a_coeff": b.a_coeff,
        "b_coeffs": list(b.b_coeffs),
        "c_matrix": [[float(x) for x in row] for row in b.c_matrix.m],
        "log_z": b.log_z,
    }


def cmd_rg_step(args) -> None:
    fam = family_from_args(args)
    vals = _floats(args.a, 3, "--a")
    a = CotangentVector(*vals)
    p_new, q_new = rg_step(fam, a)
    payload = {
        "family": fam.name,
        "a": list(a.astuple()),
        "p_new": p_new,
        "q_new": q_new,
        "breakdown": _breakdown_dict(assemble_subdivided(fam, a)),
        "config": _config(),
    }
    _emit_json(payload, args.out)


def _cmd_rg_residual(args, projective: bool) -> None:
    fam = family_from_args(args)
    if args.samples < 1:
        raise ValueError("--samples must be positive")
    fn = projective_residual if projective else fixed_point_residual
    report = fn(fam, args.samples, args.seed, workers=args.workers)
    payload = report.to_json_dict()
    if projective and report.lam is not None and report.lam <= 0.0:
        payload["warning"] = ("lambda is not positive; the rescaled family "
                              "is inadmissible")
    payload["config"] = _config(seed=args.seed)
    _emit_json(payload, args.out)


def cmd_rg_fixed_point(args) -> None:
    _cmd_rg_residual(args, projective=False)


def cmd_rg_projective(args) -> None:
    _cmd_rg_residual(args, projective=True)


def cmd_schur(args) -> None:
    fam = family_from_args(args)
    report = verify_hierarchical(_parse_z(args.z), args.levels, fam,
                                 timing=args.timing)
    payload = report.to_json_dict()
    payload["config"] = _config()
    _emit_json(payload, args.out)


def cmd_energy(args) -> None:
    c = _floats(args.coords, 6, "--coords")
    phi = _floats(args.phi, 3, "--phi")
    x0, x1, x2 = (c[0], c[1]), (c[2], c[3]), (c[4], c[5])
    a = cot_from_coords(x0, x1, x2)
    _emit_json({
        "cotangent": cotangent_action(a, *phi),
        "metric": interpolant_energy(x0, x1, x2, *phi),
        "quadrature": quadrature_energy(x0, x1, x2, *phi),
        "config": _config(),
    }, args.out)


_SCHUR_CSV_HEADER = "family,levels,rel_frobenius,logdet,lambda_estimate"


def cmd_report(args) -> None:
    """Render the full showcase into --outdir: data files plus figures."""
    from pathlib import Path

    from . import plots

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    z = _parse_z(args.z)
    a = from_halfplane(z)

    mesh = build_mesh((0.0, 0.0), (1.0, 0.0), (z.re, z.im), args.levels)
    payload = mesh.to_json_dict()
    payload["config"] = _config()
    _emit_json(payload, str(outdir / "mesh.json"))
    plots.save_figure(plots.mesh_figure(mesh), outdir / "mesh.png")

    stats = random_flow(a, args.steps, args.samples, args.seed,
                        workers=args.workers)
    lines = _config_lines(seed=args.seed, command="flow", z=args.z,
                          steps=args.steps, samples=args.samples)
    _emit(flow_csv(stats, lines), str(outdir / "flow.csv"))
    plots.save_figure(plots.flow_figure(stats), outdir / "flow.png")

    families = (cotangent_family(), constant_family())
    rows = []
    for fam in families:
        for levels in range(1, args.schur_levels + 1):
            rep = verify_hierarchical(z, levels, fam)
            rows.append({"family": rep.family, "levels": rep.levels,
                         "rel_frobenius": rep.rel_frobenius,
                         "logdet": rep.logdet,
                         "lambda_estimate": rep.lambda_estimate})
    csv_lines = [f"# {line}" for line in
                 _config_lines(command="schur", z=args.z,
                               schur_levels=args.schur_levels)]
    csv_lines.append(_SCHUR_CSV_HEADER)
    for r in rows:
        csv_lines.append(",".join([r["family"], str(r["levels"])] +
                                  [repr(r[k]) for k in
                                   ("rel_frobenius", "logdet",
                                    "lambda_estimate")]))
    _emit("\n".join(csv_lines) + "\n", str(outdir / "schur.csv"))
    plots.save_figure(plots.schur_figure(rows), outdir / "schur.png")

    fp = fixed_point_residual(families[0], args.samples, args.seed,
                              workers=args.workers)
    pj = projective_residual(families[1], args.samples, args.seed,
                             workers=args.workers)
    _emit_json({
        "fixed_point": fp.to_json_dict(),
        "projective_constant": pj.to_json_dict(),
        "config": _config(seed=args.seed),
    }, str(outdir / "fixed_point.json"))

    artifacts = ["fixed_point.json", "flow.csv", "flow.png", "mesh.json",
                 "mesh.png", "schur.csv", "schur.png"]
    _emit_json({
        "artifacts": artifacts,
        "z": [z.re, z.im],
        "levels": args.levels,
        "schur_levels": args.schur_levels,
        "steps": args.steps,
        "samples": args.samples,
        "config": _config(seed=args.seed),
    }, str(outdir / "report.json"))
    for name in artifacts + ["report.json"]:
        print(outdir / name)


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trirg",
        description="Hierarchical renormalization of Gaussian fields on "
                    "triangles: shape space, centroid subdivision, "
                    "decimation, and Schur-complement verification.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("--identity-tol-scale", type=float, default=None,
                        metavar="X",
                        help="override the cotangent-identity tolerance scale "
                             f"(default {shape_mod.IDENTITY_TOL_SCALE!r})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shape", help="shape-space coordinates of a triangle")
    p.add_argument("--coords", metavar="x0,y0,x1,y1,x2,y2")
    p.add_argument("--angles", metavar="T0,T1,T2",
                   help="interior angles in degrees")
    p.add_argument("--z", metavar="RE,IM", help="half-plane coordinate")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_shape)

    p = sub.add_parser("subdivide", help="write a hierarchical mesh as JSON")
    p.add_argument("--z", default=EQUILATERAL_Z, metavar="RE,IM")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("flow", help="flatness statistics along random "
                                    "subdivision paths, as CSV")
    p.add_argument("--z", default=EQUILATERAL_Z, metavar="RE,IM")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("rg", help="decimation map on quadratic actions")
    rg = p.add_subparsers(dest="rg_command", required=True)

    q = rg.add_parser("step", help="one decimation step at a given shape")
    _add_family_args(q)
    q.add_argument("--a", required=True, metavar="A0,A1,A2",
                   help="cotangent vector of the shape")
    q.add_argument("--out", metavar="PATH")
    q.set_defaults(func=cmd_rg_step)

    q = rg.add_parser("fixed-point",
                      help="residual of (P,Q) under decimation on random shapes")
    _add_family_args(q)
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--out", metavar="PATH")
    q.set_defaults(func=cmd_rg_fixed_point)

    q = rg.add_parser("projective",
                      help="fixed-point residual up to a field rescaling")
    _add_family_args(q)
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--out", metavar="PATH")
    q.set_defaults(func=cmd_rg_projective)

    p = sub.add_parser("schur", help="multi-level elimination vs the "
                                     "single-triangle action")
    _add_family_args(p)
    p.add_argument("--z", default=EQUILATERAL_Z, metavar="RE,IM")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--timing", action="store_true",
                   help="fill elapsed_ms (makes output run-dependent)")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("energy", help="one triangle's field energy, three ways")
    p.add_argument("--coords", required=True, metavar="x0,y0,x1,y1,x2,y2")
    p.add_argument("--phi", required=True, metavar="F0,F1,F2")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("report", help="render data files and figures for a "
                                      "full verification run")
    p.add_argument("--outdir", required=True)
    p.add_argument("--z", default=EQUILATERAL_Z, metavar="RE,IM")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--schur-levels", type=int, default=4)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    saved_scale = shape_mod.IDENTITY_TOL_SCALE
    if args.identity_tol_scale is not None:
        shape_mod.IDENTITY_TOL_SCALE = args.identity_tol_scale
    try:
        args.func(args)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except NUMERIC_ERRORS as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except ZeroDivisionError as exc:
        print(f"domain error: family expression divided by zero ({exc})",
              file=sys.stderr)
        return 3
    finally:
        shape_mod.IDENTITY_TOL_SCALE = saved_scale
    return 0


if __name__ == "__main__":
    sys.exit(main())
