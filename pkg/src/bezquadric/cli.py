"""Command-line interface.

Exit codes: 0 when the patch lies on a quadric, 2 for ``NotAQuadric``, 1 for
input errors (unreadable or malformed files, bad options) and 3 for other
numerical failures (degenerate frames, inconsistent cross-checks).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

import numpy as np
import yaml

from .config import DEFAULT_TOL, Tolerances
from .errors import InputError, NotAQuadric, QuadricError
from .patch import TPPatch, load_patch, patch_to_dict, sample_patch
from .pipeline import analyze, implicitize
from .report import SCHEMA, build_report, human_summary
from .canonical import tp_to_tri

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_INPUT, EXIT_NOT_QUADRIC, EXIT_NUMERIC = 0, 1, 2, 3


def _g17(x: float) -> str:
    return f"{x:.17g}"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="patch file (YAML or JSON)")
    common.add_argument("--grid", type=int, default=None, help="sample grid side (default 15)")
    common.add_argument("--human", action="store_true", help="prose summary instead of a document")
    common.add_argument("--format", choices=("doc", "tuple"), default="doc",
                        help="structured document or bare numbers")
    common.add_argument("--config", help="YAML file with tolerance overrides and grid")
    for f in fields(Tolerances):
        common.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, type=float, default=None,
                            metavar="REAL", help=f"default {getattr(DEFAULT_TOL, f.name):g}")

    parser = argparse.ArgumentParser(prog="bezquadric",
                                     description="Implicitize and classify quadric Bezier patches.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="full report")
    sub.add_parser("implicit", parents=[common], help="implicit coefficients")
    sub.add_parser("elements", parents=[common], help="principal planes, axes, vertex")
    sub.add_parser("check", parents=[common], help="residual of the implicit form on a sample grid")
    sub.add_parser("tp-to-tri", parents=[common], help="reduce a tensor-product patch to a triangle")
    sub.add_parser("dump", parents=[common], help="echo the parsed patch")
    return parser


def _settings(args) -> tuple[Tolerances, int]:
    grid = 15
    overrides = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = yaml.safe_load(fh) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise InputError(f"config {args.config} must be a mapping")
        grid = int(cfg.get("grid", grid))
        overrides.update(cfg.get("tolerances", {k: v for k, v in cfg.items() if k != "grid"}))
    overrides.update({f.name: getattr(args, f.name) for f in fields(Tolerances)
                      if getattr(args, f.name) is not None})
    if args.grid is not None:
        grid = args.grid
    if grid < 2:
        raise InputError("--grid must be at least 2")
    try:
        tol = DEFAULT_TOL.updated(**overrides)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    return tol, grid


def _emit(doc, out) -> None:
    out.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")


def _cmd_classify(patch, args, tol, grid, out) -> int:
    report = build_report(analyze(patch, tol, grid))
    if args.human:
        out.write(human_summary(report) + "\n")
    elif args.format == "tuple":
        out.write(f"{report.classification['kind']} {_g17(report.classification['lambda'])}\n")
    else:
        out.write(report.to_json() + "\n")
    return EXIT_OK


def _cmd_implicit(patch, args, tol, grid, out) -> int:
    _, _, _, implicit, _ = implicitize(patch, tol)
    coeffs = [float(c) for c in implicit.coeffs10]
    if args.human:
        out.write(implicit.equation() + "\n")
    elif args.format == "tuple":
        out.write("(" + ", ".join(_g17(c) for c in coeffs) + ")\n")
    else:
        report = build_report(analyze(patch, tol, grid, elements=False))
        _emit({"schema": SCHEMA, **report.implicit}, out)
    return EXIT_OK


def _cmd_elements(patch, args, tol, grid, out) -> int:
    report = build_report(analyze(patch, tol, grid))
    if args.human:
        out.write(human_summary(report) + "\n")
    elif args.format == "tuple":
        for mu, k in report.elements["mus"]:
            out.write(f"{_g17(mu)} {k}\n")
    else:
        _emit({"schema": SCHEMA, "kind": report.classification["kind"], **report.elements}, out)
    return EXIT_OK


def _cmd_check(patch, args, tol, grid, out) -> int:
    _, _, _, implicit, _ = implicitize(patch, tol)
    residual = float(np.max(implicit.normalized_residual(sample_patch(patch, grid))))
    ok = residual <= tol.tol_quadric
    if args.human:
        verdict = "on a quadric" if ok else "NOT on the implicit quadric"
        out.write(f"max residual {residual:.3g} on a {grid}x{grid} grid: {verdict}\n")
    elif args.format == "tuple":
        out.write(_g17(residual) + "\n")
    else:
        _emit({"schema": SCHEMA, "grid": grid, "residual_max": residual,
               "tolerance": tol.tol_quadric, "ok": ok}, out)
    return EXIT_OK if ok else EXIT_NOT_QUADRIC


def _cmd_tp_to_tri(patch, args, tol, grid, out) -> int:
    if not isinstance(patch, TPPatch):
        raise InputError("tp-to-tri needs a tensor-product patch (type: tensor)")
    canon = tp_to_tri(patch, tol)
    doc = patch_to_dict(canon.patch)
    if args.human or args.format == "tuple":
        for p, w in zip(doc["points"], doc["weights"]):
            out.write(" ".join(_g17(x) for x in p) + f"  {_g17(w)}\n")
    else:
        _emit(doc, out)
    return EXIT_OK


def _cmd_dump(patch, args, tol, grid, out) -> int:
    _emit(patch_to_dict(patch), out)
    return EXIT_OK


_COMMANDS = {"classify": _cmd_classify, "implicit": _cmd_implicit, "elements": _cmd_elements,
             "check": _cmd_check, "tp-to-tri": _cmd_tp_to_tri, "dump": _cmd_dump}


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        tol, grid = _settings(args)
        patch = load_patch(args.file)
        return _COMMANDS[args.command](patch, args, tol, grid, out)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except NotAQuadric as exc:
        err.write(f"not a quadric: {exc}\n")
        return EXIT_NOT_QUADRIC
    except QuadricError as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
