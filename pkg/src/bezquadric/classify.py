"""Affine classification: center, conic at infinity and the decision tree.

With ``Om~_A = eps_A Om_A`` the center is the pole of the plane at infinity
``z = eps_W p + eps_V q + eps_U r + eps_T t``:

    Z = eps_W Om_W Om_P P + eps_V Om_V Om_Q Q + eps_U Om_U Om_R R - (eps_T/lam) T,

whose weight Om_Z vanishes exactly for paraboloids, and

    det Z = lam (Om~_U Om~_V + Om~_V Om~_W + Om~_W Om~_U) - eps_T

is, up to a positive factor, the determinant of the conic at infinity.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances, borderline
from .errors import Inconsistent
from .forms import conic_type, corner_conic_arc, point_form
from .frame import QuadricFrame
from .patch import TriPatch, boundaries
from .projective import Basis, HPoint, SymForm3

__all__ = [
    "QuadricKind",
    "QuadricClass",
    "center",
    "plane_at_infinity",
    "conic_at_infinity",
    "cylinder_section_type",
    "classify",
]


class QuadricKind(str, enum.Enum):
    ELLIPSOID = "Ellipsoid"
    TWO_SHEETED_HYPERBOLOID = "TwoSheetedHyperboloid"
    ELLIPTIC_PARABOLOID = "EllipticParaboloid"
    ONE_SHEETED_HYPERBOLOID = "OneSheetedHyperboloid"
    HYPERBOLIC_PARABOLOID = "HyperbolicParaboloid"
    CONE = "Cone"
    ELLIPTIC_CYLINDER = "EllipticCylinder"
    PARABOLIC_CYLINDER = "ParabolicCylinder"
    HYPERBOLIC_CYLINDER = "HyperbolicCylinder"
    NOT_A_QUADRIC = "NotAQuadric"

    @property
    def is_paraboloid(self) -> bool:
        return self in (QuadricKind.ELLIPTIC_PARABOLOID, QuadricKind.HYPERBOLIC_PARABOLOID)

    @property
    def is_cylinder(self) -> bool:
        return self in (QuadricKind.ELLIPTIC_CYLINDER, QuadricKind.PARABOLIC_CYLINDER,
                        QuadricKind.HYPERBOLIC_CYLINDER)

    @property
    def is_central(self) -> bool:
        return self in (QuadricKind.ELLIPSOID, QuadricKind.TWO_SHEETED_HYPERBOLOID,
                        QuadricKind.ONE_SHEETED_HYPERBOLOID)


@dataclass(frozen=True, eq=False)
class QuadricClass:
    """Affine type with the quantities that decided it.

    ``center`` is the center for central quadrics, the axis direction for
    paraboloids, the apex for cones and a point of the axis (or the axis
    direction) for cylinders.
    """

    kind: QuadricKind
    center: HPoint | None
    detZ: float | None
    lam: float
    Omega_Z: float | None = None
    flags: tuple = field(default_factory=tuple)


def _center_raw(f: QuadricFrame, lam: float, with_T: bool = True) -> tuple[np.ndarray, float]:
    OtU, OtV, OtW = f.Omega_tilde
    terms = [OtW * f.Omega_P * f.P.coords, OtV * f.Omega_Q * f.Q.coords, OtU * f.Omega_R * f.R.coords]
    if with_T and f.eps_T and lam != 0.0:
        terms.append(-(1.0 / lam) * f.T.coords)
    raw = np.sum(terms, axis=0)
    size = sum(abs(x[3]) for x in terms)
    return raw, size


def center(f: QuadricFrame, lam: float | None = None,
           tol: Tolerances = DEFAULT_TOL) -> tuple[HPoint, float]:
    """Center Z and its weight Om_Z (taken as 1 when Z is a direction).

    Om_Z is compared with the magnitude of its four contributions.
    """
    lam = f.lam if lam is None else lam
    raw, size = _center_raw(f, lam)
    Om_Z = raw[3]
    if abs(Om_Z) > tol.tol_center * size:
        return HPoint(raw / Om_Z), float(Om_Z)
    return HPoint(raw), 1.0


def _is_paraboloid_center(f: QuadricFrame, lam: float, tol: Tolerances) -> tuple[bool, float, float]:
    raw, size = _center_raw(f, lam)
    return abs(raw[3]) <= tol.tol_center * size, float(raw[3]), float(size)


def plane_at_infinity(f: QuadricFrame) -> np.ndarray:
    """Frame coordinates ``(eps_W, eps_V, eps_U, eps_T)`` of the plane at infinity."""
    return np.array([f.eps_W, f.eps_V, f.eps_U, f.eps_T], dtype=float)


def _detZ_terms(f: QuadricFrame, lam: float) -> tuple[float, float]:
    OtU, OtV, OtW = f.Omega_tilde
    pairs = OtU * OtV + OtV * OtW + OtW * OtU
    size = abs(lam) * (abs(OtU * OtV) + abs(OtV * OtW) + abs(OtW * OtU)) + f.eps_T
    return lam * pairs - f.eps_T, size


def conic_at_infinity(f: QuadricFrame, lam: float | None = None) -> tuple[SymForm3, float]:
    """Point form restricted to the plane at infinity, and det Z.

    The restriction eliminates ``t`` when T is proper (``t = -(eps_W p +
    eps_V q + eps_U r)`` there) and otherwise the first of ``p, q, r`` whose
    reference point is proper. Its determinant has the sign of det Z.
    """
    lam = f.lam if lam is None else lam
    z = plane_at_infinity(f)
    pivot = 3 if f.eps_T else int(np.flatnonzero(z[:3])[0])
    cols = []
    for j in range(4):
        if j == pivot:
            continue
        e = np.zeros(4)
        e[j] = 1.0
        e[pivot] = -z[j] / z[pivot]
        cols.append(e)
    B = np.column_stack(cols)
    form = point_form(f, lam).congruent(B, Basis.INFINITY)
    detZ, _ = _detZ_terms(f, lam)
    return form, float(detZ)


def cylinder_section_type(f: QuadricFrame, patch: TriPatch | None = None,
                          tol: Tolerances = DEFAULT_TOL) -> str:
    """Type of the conic cut by the corner plane (a boundary arc as fallback)."""
    arc = corner_conic_arc(f)
    if arc is not None and f.Omega_P * f.Omega_Q != 0.0:
        return conic_type(f.Omega_P, 0.5 * f.Omega_U, f.Omega_Q, tol)
    if not f.eps_U and f.Omega_P * f.Omega_Q != 0.0:
        # middle point at infinity: weight of the weighted middle point is 0
        return conic_type(f.Omega_P, 0.0, f.Omega_Q, tol)
    if patch is None:
        raise ValueError("corner conic is degenerate and no patch was given")
    w0, w1, w2 = boundaries(patch)[0].wts
    return conic_type(w0, w1, w2, tol)


def classify(f: QuadricFrame, lam: float | None = None, patch: TriPatch | None = None,
             tol: Tolerances = DEFAULT_TOL) -> QuadricClass:
    """Affine type from the sign of lam, the center weight and det Z.

    Raises
    ------
    Inconsistent
        The center test and det Z disagree clearly (outside the borderline band).
    """
    lam = f.lam if lam is None else lam
    flags = []
    if lam == 0.0:
        if f.eps_T:
            return QuadricClass(QuadricKind.CONE, HPoint(f.T.coords), None, 0.0)
        section = cylinder_section_type(f, patch, tol)
        kind = {"ellipse": QuadricKind.ELLIPTIC_CYLINDER,
                "parabola": QuadricKind.PARABOLIC_CYLINDER,
                "hyperbola": QuadricKind.HYPERBOLIC_CYLINDER}[section]
        raw, size = _center_raw(f, 0.0, with_T=False)
        Z = HPoint(raw / raw[3]) if abs(raw[3]) > tol.tol_center * size else HPoint(f.T.coords)
        return QuadricClass(kind, Z, None, 0.0)

    is_par, Om_Z, size_Z = _is_paraboloid_center(f, lam, tol)
    detZ, size_det = _detZ_terms(f, lam)
    det_zero = abs(detZ) <= tol.tol_center * size_det
    near_z = borderline(Om_Z / size_Z, tol.tol_center)
    near_d = borderline(detZ / size_det, tol.tol_center)
    if near_z or near_d:
        flags.append("borderline paraboloid")
    if is_par != det_zero:
        if not (near_z or near_d):
            raise Inconsistent(
                f"center weight {Om_Z:.3g} and det Z {detZ:.3g} disagree on the paraboloid test")
        flags.append("center test and det Z disagree within the borderline band")
        is_par = True
    Z, Om = center(f, lam, tol)
    if is_par:
        Z, Om = HPoint(_center_raw(f, lam)[0]), 1.0
        kind = QuadricKind.ELLIPTIC_PARABOLOID if lam > 0 else QuadricKind.HYPERBOLIC_PARABOLOID
    elif lam > 0:
        kind = QuadricKind.ELLIPSOID if detZ > 0 else QuadricKind.TWO_SHEETED_HYPERBOLOID
    else:
        kind = QuadricKind.ONE_SHEETED_HYPERBOLOID
    return QuadricClass(kind, Z, float(detZ), float(lam), float(Om_Z), tuple(flags))
