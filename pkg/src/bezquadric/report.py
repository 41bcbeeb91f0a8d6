"""Versioned, JSON-serializable report of an analysis."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .forms import MONOMIALS
from .patch import patch_to_dict
from .pipeline import QuadricAnalysis
from .projective import HPoint, LinForm

__all__ = ["SCHEMA", "Report", "build_report", "plane_equation", "human_summary"]

SCHEMA = "bezquadric-report/1"


def _num(x) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _vec(v) -> list:
    return [_num(x) for x in np.asarray(v, dtype=float).ravel()]


def _point(p: HPoint | None) -> dict | None:
    """``{"proper": bool, "coords": [...]}``, affine when proper."""
    if p is None:
        return None
    c = np.asarray(p.coords, dtype=float)
    if p.is_proper():
        return {"proper": True, "coords": _vec(c[:3] / c[3])}
    d = c[:3] / np.linalg.norm(c[:3])
    return {"proper": False, "coords": _vec(d)}


def plane_equation(plane: LinForm, digits: int = 6) -> str:
    """``a*x + b*y + c*z + d = 0`` with the largest coefficient scaled to 1."""
    c = plane.coeffs / np.abs(plane.coeffs).max()
    first = np.flatnonzero(np.abs(c) > 1e-12)[0]
    c = c * np.sign(c[first])
    terms = []
    for value, name in zip(c, ("x", "y", "z", "")):
        if abs(value) < 10.0 ** (-digits):
            continue
        mag = f"{abs(value):.{digits}g}"
        body = name if (name and mag == "1") else (f"{mag}*{name}" if name else mag)
        terms.append(("- " if value < 0 else "+ ") + body)
    text = " ".join(terms)
    return (text[2:] if text.startswith("+ ") else "-" + text[2:]) + " = 0"


def _plane(plane: LinForm) -> dict:
    c = plane.coeffs / np.abs(plane.coeffs).max()
    return {"coeffs": _vec(c), "equation": plane_equation(plane)}


@dataclass(frozen=True)
class Report:
    """Plain-data report; every field is JSON-compatible.

    Sections mirror the pipeline: ``input`` echoes the parsed patch,
    ``canonical`` the rescaled weights, ``frame`` the projective frame,
    then ``classification``, ``implicit``, ``elements`` and ``diagnostics``.
    """

    schema: str
    input: dict
    canonical: dict | None
    frame: dict
    classification: dict
    implicit: dict
    elements: dict | None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def _canonical_section(a: QuadricAnalysis) -> dict | None:
    c = a.canonical
    if c is None:
        return None
    return {
        "omega": {"u": _num(c.omega_u), "v": _num(c.omega_v), "w": _num(c.omega_w)},
        "weights": _vec(c.patch.weights),
        "points": [_vec(p) for p in c.patch.points],
        "common_point": _point(c.S),
    }


def _frame_section(a: QuadricAnalysis) -> dict:
    f = a.frame
    return {
        "path": a.path,
        "lambda": _num(f.lam),
        "Omega": {k: _num(getattr(f, f"Omega_{k}")) for k in ("U", "V", "W", "P", "Q", "R")},
        "eps": {k: v for k, v in f.eps.items()},
        "points": {k: _point(getattr(f, k)) for k in ("U", "V", "W", "T")},
        "planes": {k: _vec(getattr(f, k).coeffs) for k in ("p", "q", "r", "t")},
    }


def _elements_section(a: QuadricAnalysis) -> dict | None:
    e = a.elements
    if e is None:
        return None
    families = []
    for fam in e.families:
        families.append({"mu": _num(fam.mu), "multiplicity": fam.multiplicity,
                         "directions": [_vec(d / np.linalg.norm(d)) for d in fam.directions],
                         "planes": [_plane(pl) for pl in fam.planes]})
    axes = [{"point": _point(p), "direction": _point(d)} for p, d in e.axes]
    return {
        "center": _point(a.klass.center),
        "mus": [[_num(mu), k] for mu, k in e.mus],
        "principal_planes": [_plane(pl) for pl in e.principal_planes],
        "families": families,
        "axes": axes,
        "is_revolution": bool(e.is_revolution),
        "is_sphere": bool(e.is_sphere),
        "vertex": _point(e.vertex),
        "cylinder_axis": None if e.cylinder_axis is None else
        {"point": _point(e.cylinder_axis[0]), "direction": _point(e.cylinder_axis[1])},
        "revolution_axis": None if e.revolution_axis is None else
        {"point": _point(e.revolution_axis[0]), "direction": _point(e.revolution_axis[1])},
        "cubic": _vec(e.cubic),
        "discriminant": _num(e.discriminant),
    }


def build_report(a: QuadricAnalysis) -> Report:
    k = a.klass
    return Report(
        schema=SCHEMA,
        input=patch_to_dict(a.source),
        canonical=_canonical_section(a),
        frame=_frame_section(a),
        classification={"kind": k.kind.value, "lambda": _num(k.lam), "center": _point(k.center),
                        "detZ": None if k.detZ is None else _num(k.detZ),
                        "Omega_Z": None if k.Omega_Z is None else _num(k.Omega_Z)},
        implicit={"monomials": list(MONOMIALS), "coeffs": _vec(a.implicit.coeffs10),
                  "equation": a.implicit.equation()},
        elements=_elements_section(a),
        diagnostics={"residual_max": _num(a.residual), "grid": a.grid,
                     "warnings": list(a.warnings),
                     "borderline": [w for w in a.warnings if "borderline" in w]},
    )


def _fmt_point(p: dict | None) -> str:
    if p is None:
        return "none"
    c = np.asarray(p["coords"], dtype=float)
    c = np.where(np.abs(c) < 1e-12 * max(1.0, np.abs(c).max()), 0.0, c)  # hide rounding noise
    xyz = ", ".join(f"{x:.6g}" for x in c)
    return f"({xyz})" if p["proper"] else f"direction ({xyz})"


def human_summary(r: Report) -> str:
    """Short prose rendering of a report."""
    c = r.classification
    lines = [f"{c['kind']} (lambda = {c['lambda']:.10g}, {r.frame['path']} path)",
             f"implicit: {r.implicit['equation']}"]
    if c["kind"] in ("Ellipsoid", "TwoSheetedHyperboloid", "OneSheetedHyperboloid"):
        lines.append(f"center: {_fmt_point(c['center'])}, det Z = {c['detZ']:.10g}")
    elif c["center"] is not None:
        lines.append(f"center: {_fmt_point(c['center'])}")
    e = r.elements
    if e is not None:
        top = max(abs(mu) for mu, _ in e["mus"])
        mus = ", ".join(f"{0.0 if abs(mu) < 1e-12 * top else mu:.6g}" + (f" (x{k})" if k > 1 else "")
                        for mu, k in e["mus"])
        lines.append(f"mu: {mus}")
        for pl in e["principal_planes"]:
            lines.append(f"principal plane: {pl['equation']}")
        for ax in e["axes"]:
            lines.append(f"axis: through {_fmt_point(ax['point'])} along {_fmt_point(ax['direction'])}")
        if e["vertex"] is not None:
            lines.append(f"vertex: {_fmt_point(e['vertex'])}")
        if e["is_sphere"]:
            lines.append("sphere")
        elif e["is_revolution"]:
            lines.append("surface of revolution")
    lines.append(f"max residual on {r.diagnostics['grid']}x{r.diagnostics['grid']} grid: "
                 f"{r.diagnostics['residual_max']:.3g}")
    lines += [f"warning: {w}" for w in r.diagnostics["warnings"]]
    return "\n".join(lines)
