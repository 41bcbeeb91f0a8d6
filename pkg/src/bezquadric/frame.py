"""Projective frame of a quadric patch.

The frame consists of the tangent planes ``p, q, r`` at the corners
``P = c002``, ``Q = c020``, ``R = c200``, the corner plane ``t`` through them,
the tangent-triangle vertices ``U = p^q^t``, ``V = p^r^t``, ``W = q^r^t`` and
the pole ``T = p^q^r`` of ``t``. Linear forms are scaled so that
``p(W) = q(V) = r(U) = t(T) = 1``. For a point at infinity the raw
homogeneous vector is kept as representative and its weight is taken as one.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .canonical import CanonicalTri, degenerate_weights
from .config import DEFAULT_TOL, Tolerances, borderline
from .errors import CollinearInput, DegenerateFrame, DependentPlanes, InconsistentFrame, NotAQuadric
from .patch import TriPatch
from .projective import HPoint, LinForm, meet3, plane_through

__all__ = ["QuadricFrame", "build_frame", "frame_degenerate", "point_T", "corner_weights"]


@dataclass(frozen=True, eq=False)
class QuadricFrame:
    """Geometric scaffold shared by all downstream formulas.

    ``Omega_U, Omega_V, Omega_W`` are the weights of the tangent-triangle
    vertices (1 for improper ones) and ``Omega_P, Omega_Q, Omega_R`` the
    corner weights ``w002 omega_w, w020 omega_v, w200 omega_u``.
    ``lam`` is ``None`` until the pencil parameter has been computed.
    """

    P: HPoint
    Q: HPoint
    R: HPoint
    p: LinForm
    q: LinForm
    r: LinForm
    t: LinForm
    U: HPoint
    V: HPoint
    W: HPoint
    T: HPoint
    eps_U: int
    eps_V: int
    eps_W: int
    eps_T: int
    eps_S: int | None
    Omega_U: float
    Omega_V: float
    Omega_W: float
    Omega_P: float
    Omega_Q: float
    Omega_R: float
    omega_u: float | None = None
    omega_v: float | None = None
    omega_w: float | None = None
    S: HPoint | None = None
    lam: float | None = None
    degenerate: bool = False
    warnings: tuple = field(default_factory=tuple)

    def with_lambda(self, lam: float) -> "QuadricFrame":
        return replace(self, lam=float(lam))

    @property
    def forms(self) -> np.ndarray:
        """Rows ``p, q, r, t`` (Cartesian coefficients)."""
        return np.array([self.p.coeffs, self.q.coeffs, self.r.coeffs, self.t.coeffs])

    @property
    def points(self) -> np.ndarray:
        """Columns ``U, V, W, T`` (representatives)."""
        return np.column_stack([self.U.coords, self.V.coords, self.W.coords, self.T.coords])

    @property
    def eps(self) -> dict:
        return {"U": self.eps_U, "V": self.eps_V, "W": self.eps_W, "T": self.eps_T, "S": self.eps_S}

    @property
    def Omega_tilde(self) -> tuple[float, float, float]:
        """``eps_A * Omega_A`` for A = U, V, W."""
        return (self.eps_U * self.Omega_U, self.eps_V * self.Omega_V, self.eps_W * self.Omega_W)


def _representative(raw: np.ndarray, tol: Tolerances, name: str, notes: list):
    """``(rep, Omega, eps)``: divide by the weight when proper, keep raw otherwise."""
    ratio = abs(raw[3]) / np.abs(raw).max()
    if borderline(ratio, tol.tol_infinity):
        notes.append(f"{name} is close to the plane at infinity (|w|/max = {ratio:.3g})")
    if ratio > tol.tol_infinity:
        return raw / raw[3], float(raw[3]), 1
    return raw.copy(), 1.0, 0


def _plane(a, b, c, tol, name):
    try:
        return plane_through(a, b, c, tol=tol)
    except CollinearInput as exc:
        raise DegenerateFrame(f"plane {name} is undefined ({exc})") from None


def _tangent_planes(patch: TriPatch, tol: Tolerances):
    h = {k: np.append(patch.point(k), 1.0) for k in ("002", "011", "020", "101", "110", "200")}
    return (_plane(h["002"], h["011"], h["101"], tol, "p"),
            _plane(h["020"], h["011"], h["110"], tol, "q"),
            _plane(h["200"], h["101"], h["110"], tol, "r"),
            _plane(h["002"], h["020"], h["200"], tol, "t"))


def _normalize(form: LinForm, point: np.ndarray, name: str) -> LinForm:
    value = form.coeffs @ point
    if abs(value) <= 1e-12 * np.linalg.norm(point):
        raise DegenerateFrame(f"plane {name} passes through its normalization point")
    return form.scaled(1.0 / value)


def corner_weights(c: CanonicalTri) -> tuple[float, float, float]:
    """``(Omega_P, Omega_Q, Omega_R) = (w002 omega_w, w020 omega_v, w200 omega_u)``."""
    pt = c.patch
    return (pt.weight("002") * c.omega_w, pt.weight("020") * c.omega_v, pt.weight("200") * c.omega_u)


def _T_closed_form(c: CanonicalTri) -> np.ndarray:
    """Homogeneous T as a combination of P, Q, R and S."""
    ou, ov, ow = c.omega_u, c.omega_v, c.omega_w
    pt = c.patch
    P, Q, R = (np.append(pt.point(k), 1.0) for k in ("002", "020", "200"))
    a = pt.weight("002") * ow * (ou + ov - ow)
    b = pt.weight("020") * ov * (ou - ov + ow)
    cc = pt.weight("200") * ou * (-ou + ov + ow)
    return a * P + b * Q + cc * R - 2.0 * ou * ov * ow * c.S.coords


def point_T(c: CanonicalTri, f: QuadricFrame, tol: Tolerances = DEFAULT_TOL) -> HPoint:
    """Pole T of the corner plane from its closed barycentric formula.

    The result is cross-checked against the intersection of ``p, q, r``.
    Its weight (the w-coordinate) is the denominator of that formula; for an
    improper T the raw vector is returned.

    Raises
    ------
    InconsistentFrame
        The closed form does not lie on the three tangent planes.
    """
    raw = _T_closed_form(c)
    unit = raw / np.linalg.norm(raw)
    worst = max(abs(plane.coeffs @ unit) / np.linalg.norm(plane.coeffs) for plane in (f.p, f.q, f.r))
    if worst > tol.tol_frame:
        raise InconsistentFrame(f"closed-form T misses the tangent planes by {worst:.3g}")
    rep, _, _ = _representative(raw, tol, "T", [])
    return HPoint(rep)


def build_frame(c: CanonicalTri, tol: Tolerances = DEFAULT_TOL) -> QuadricFrame:
    """Frame of a canonicalized patch with a common point S."""
    if c.degenerate_hint or c.S is None:
        return frame_degenerate(c.patch, tol)
    pt = c.patch
    notes: list[str] = []
    P, Q, R = (np.append(pt.point(k), 1.0) for k in ("002", "020", "200"))
    OP, OQ, OR = corner_weights(c)
    raws = {"U": OP * P + OQ * Q - OR * R,
            "V": OP * P - OQ * Q + OR * R,
            "W": -OP * P + OQ * Q + OR * R}
    reps = {k: _representative(v, tol, k, notes) for k, v in raws.items()}
    U, V, W = (reps[k][0] for k in "UVW")

    p, q, r, t = _tangent_planes(pt, tol)
    p = _normalize(p, W, "p")
    q = _normalize(q, V, "q")
    r = _normalize(r, U, "r")

    T_raw = _T_closed_form(c)
    T_rep, _, eps_T = _representative(T_raw, tol, "T", notes)
    try:
        T_meet = meet3(p, q, r, tol=tol)
    except DependentPlanes as exc:
        raise DegenerateFrame(f"tangent planes do not meet in a point ({exc})") from None
    if not HPoint(T_rep).same_as(T_meet, tol.tol_frame):
        raise InconsistentFrame("closed-form T disagrees with the meet of p, q, r")
    t = _normalize(t, T_rep, "t")

    frame = QuadricFrame(
        P=HPoint(P), Q=HPoint(Q), R=HPoint(R), p=p, q=q, r=r, t=t,
        U=HPoint(U), V=HPoint(V), W=HPoint(W), T=HPoint(T_rep),
        eps_U=reps["U"][2], eps_V=reps["V"][2], eps_W=reps["W"][2], eps_T=eps_T, eps_S=c.eps_S,
        Omega_U=reps["U"][1], Omega_V=reps["V"][1], Omega_W=reps["W"][1],
        Omega_P=OP, Omega_Q=OQ, Omega_R=OR,
        omega_u=c.omega_u, omega_v=c.omega_v, omega_w=c.omega_w, S=c.S,
        warnings=tuple(notes),
    )
    return frame


def frame_degenerate(patch: TriPatch, tol: Tolerances = DEFAULT_TOL) -> QuadricFrame:
    """Frame of a cone or cylinder patch without a common point S.

    U, V, W are intersections of the tangent planes with ``t``; their weights
    follow from the linear relations with the corners, up to one common
    factor, fixed so the largest proper weight is +1. The pencil parameter is 0.
    """
    try:
        data = degenerate_weights(patch, tol)
    except NotAQuadric as exc:
        raise DegenerateFrame(str(exc)) from None
    notes: list[str] = []
    p, q, r, t = data["planes"]
    U_raw, V_raw, W_raw, T_dir = data["points"]
    reps = {k: _representative(v, tol, k, notes) for k, v in zip("UVW", (U_raw, V_raw, W_raw))}
    U, V, W = (reps[k][0] for k in "UVW")
    T_rep, _, eps_T = _representative(T_dir, tol, "T", notes)
    OP, OQ, OR = data["Omega_corner"]
    P, Q, R = (np.append(patch.point(k), 1.0) for k in ("002", "020", "200"))
    return QuadricFrame(
        P=HPoint(P), Q=HPoint(Q), R=HPoint(R),
        p=_normalize(p, W, "p"), q=_normalize(q, V, "q"), r=_normalize(r, U, "r"),
        t=_normalize(t, T_rep, "t"),
        U=HPoint(U), V=HPoint(V), W=HPoint(W), T=HPoint(T_rep),
        eps_U=reps["U"][2], eps_V=reps["V"][2], eps_W=reps["W"][2], eps_T=eps_T, eps_S=None,
        Omega_U=reps["U"][1], Omega_V=reps["V"][1], Omega_W=reps["W"][1],
        Omega_P=OP, Omega_Q=OQ, Omega_R=OR,
        lam=0.0, degenerate=True, warnings=tuple(notes),
    )
