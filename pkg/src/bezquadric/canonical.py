"""Common boundary point, Moebius weight normalization and net reductions.

A quadratic triangle lies on a non-degenerate quadric when its three boundary
conics pass through one extra point S with coplanar tangents there. Rescaling
the weights by ``alpha**i beta**j gamma**k`` (a Moebius reparametrization)
makes the three second differences of the weighted control points

    H_u = C002 - 2 C011 + C020,  H_v = C002 - 2 C101 + C200,
    H_w = C200 - 2 C110 + C020

(with ``C = w (c, 1)``) all proportional to S, ``H_A = omega_A S``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    CollinearInput,
    DependentPlanes,
    NoCommonPoint,
    NoSecondIntersection,
    NotAQuadric,
)
from .patch import TPPatch, TriPatch, boundaries
from .projective import HPoint, LinForm, meet3, plane_through

__all__ = [
    "CanonicalTri",
    "second_differences",
    "find_common_point",
    "rescale_weights",
    "degenerate_weights",
    "boundary_conic_centers",
    "detect_ruled_degenerate",
    "tp_to_tri",
]


@dataclass(frozen=True, eq=False)
class CanonicalTri:
    """Triangular patch whose weights make ``H_A = omega_A * S`` hold.

    Attributes
    ----------
    patch : TriPatch
        Patch with rescaled weights.
    S : HPoint or None
        Representative used in all formulas: ``(S, 1)`` for a proper point,
        ``H_u`` itself for a point at infinity (so ``omega_u = 1`` there).
    omega_u, omega_v, omega_w : float or None
    eps_S : int
    scaling : tuple
        The ``(alpha, beta, gamma)`` applied to the input weights.
    degenerate_hint : bool
        No common point exists but the patch lies on a cone or cylinder.
    """

    patch: TriPatch
    S: HPoint | None
    omega_u: float | None
    omega_v: float | None
    omega_w: float | None
    eps_S: int
    scaling: tuple = (1.0, 1.0, 1.0)
    degenerate_hint: bool = False


def second_differences(patch: TriPatch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Homogeneous ``H_u, H_v, H_w`` of the weighted control points."""
    C = {k: patch.weighted(k) for k in ("002", "011", "020", "101", "110", "200")}
    return (C["002"] - 2 * C["011"] + C["020"],
            C["002"] - 2 * C["101"] + C["200"],
            C["200"] - 2 * C["110"] + C["020"])


def _boundary_planes(patch: TriPatch, tol: Tolerances) -> list[LinForm]:
    planes = []
    for name, conic in zip("uvw", boundaries(patch)):
        try:
            planes.append(plane_through(*conic.pts, tol=tol))
        except CollinearInput as exc:
            raise NotAQuadric(f"boundary conic {name} is degenerate ({exc})") from None
    return planes


def _decompose(target: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Coefficients of ``target`` in the span of three homogeneous vectors."""
    coef, *_ = np.linalg.lstsq(np.asarray(rows).T, target, rcond=None)
    return coef


def _conic_residual(coef: np.ndarray) -> float:
    # a C0 + b C1 + c C2 lies on the arc's conic iff b^2 = 4 a c
    a, b, c = coef
    return abs(b * b - 4 * a * c) / max(b * b + 4 * abs(a * c), 1e-300)


def find_common_point(patch: TriPatch, tol: Tolerances = DEFAULT_TOL) -> HPoint:
    """Intersection of the three boundary-conic planes, if it lies on all three conics.

    Raises
    ------
    DependentPlanes
        The planes share a line.
    NoCommonPoint
        The planes meet in a point off one of the conics.
    """
    planes = _boundary_planes(patch, tol)
    S = meet3(*planes, tol=tol)
    s = S.canonical()
    for name, conic in zip("uvw", boundaries(patch)):
        rows = conic.weighted()
        coef = _decompose(s, rows)
        if np.linalg.norm(rows.T @ coef - s) > 1e-9 or _conic_residual(coef) > tol.tol_conic:
            raise NoCommonPoint(f"meet of the boundary planes is not on conic {name}")
    return S


def _half_ratio(coef: np.ndarray) -> float:
    """Ratio ``x`` with ``(1, -2x, x^2)`` proportional to ``coef``."""
    a, b, c = coef
    # -b/(2a) and -2c/b agree on the conic; use the better-conditioned one
    if abs(2 * a) >= abs(b):
        if a == 0.0:
            raise NotAQuadric("common point coincides with a corner")
        return -b / (2 * a)
    return -2 * c / b


def rescale_weights(patch: TriPatch, S: HPoint, tol: Tolerances = DEFAULT_TOL) -> CanonicalTri:
    """Moebius-rescale the weights so the three second differences represent S.

    Ratios ``beta/gamma`` and ``alpha/gamma`` come from the u- and v-conics
    (each linear once S is written in the conic's weighted control points);
    the w-conic must then give ``alpha/beta`` consistently. With these
    weights, ``omega_A`` is the factor in ``H_A = omega_A * S``.

    Raises
    ------
    NotAQuadric
        The w-boundary ratio disagrees (tangents at S are not coplanar).
    """
    s = S.canonical()
    conic_u, conic_v, conic_w = boundaries(patch)
    beta = _half_ratio(_decompose(s, conic_u.weighted()))
    alpha = _half_ratio(_decompose(s, conic_v.weighted()))
    alpha_over_beta = _half_ratio(_decompose(s, conic_w.weighted()))
    if beta == 0.0 or alpha == 0.0:
        raise NotAQuadric("common point coincides with a corner")
    mismatch = abs(alpha_over_beta - alpha / beta) / max(abs(alpha_over_beta), abs(alpha / beta))
    if mismatch > tol.tol_compat:
        raise NotAQuadric(f"boundary reparametrizations are incompatible (mismatch {mismatch:.3g})")
    scaled = patch.reweighted(alpha, beta, 1.0)

    Hu, Hv, Hw = second_differences(scaled)
    if S.is_proper(tol):
        rep, eps_S = np.append(S.affine(), 1.0), 1
    else:
        rep, eps_S = Hu.copy(), 0
    omegas = []
    for name, H in zip("uvw", (Hu, Hv, Hw)):
        om = float(H @ rep / (rep @ rep))
        if np.linalg.norm(H - om * rep) > 1e-8 * max(np.linalg.norm(H), abs(om) * np.linalg.norm(rep)):
            raise NotAQuadric(f"second difference {name} does not represent the common point")
        omegas.append(om)
    return CanonicalTri(scaled, HPoint(rep), *omegas, eps_S, (alpha, beta, 1.0))


# --- degenerate quadrics ----------------------------------------------------

def _hom(x) -> np.ndarray:
    return np.append(np.asarray(x, dtype=float), 1.0)


def _relation(a, b, c, d) -> np.ndarray:
    """Null vector of four homogeneous points of one plane (unit 4-vectors)."""
    rows = np.array([x / np.linalg.norm(x) for x in (a, b, c, d)])
    _, _, vt = np.linalg.svd(rows.T)
    return vt[-1] / np.array([np.linalg.norm(x) for x in (a, b, c, d)])


def degenerate_weights(patch: TriPatch, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Recover the corner and tangent-triangle weights of a cone or cylinder patch.

    The tangent planes ``p, q, r`` at the corners cut the corner plane ``t`` in
    ``U = p^q^t``, ``V = p^r^t``, ``W = q^r^t``. The corners satisfy
    ``k_U U = Om_P P + Om_Q Q - Om_R R`` and cyclic relations; each relation is
    the null vector of four coplanar homogeneous points. Chaining them fixes
    all six weights up to one factor, and the third chain gives a consistency
    residual.

    Returns
    -------
    dict
        Keys ``planes`` (p, q, r, t), ``points`` (U, V, W, T as raw
        homogeneous vectors, with the Omega factor folded in),
        ``Omega`` (U, V, W), ``Omega_corner`` (P, Q, R) and ``mismatch``.
    """
    P, Q, R = (_hom(patch.point(k)) for k in ("002", "020", "200"))
    c011, c101, c110 = (_hom(patch.point(k)) for k in ("011", "101", "110"))
    try:
        p = plane_through(P, c011, c101, tol=tol)
        q = plane_through(Q, c011, c110, tol=tol)
        r = plane_through(R, c101, c110, tol=tol)
        t = plane_through(P, Q, R, tol=tol)
        dirs = [meet3(p, q, t, tol=tol), meet3(p, r, t, tol=tol), meet3(q, r, t, tol=tol)]
        T = meet3(p, q, r, tol=tol)
    except (CollinearInput, DependentPlanes) as exc:
        raise NotAQuadric(f"tangent frame is degenerate ({exc})") from None
    U, V, W = (d.coords for d in dirs)
    x1 = _relation(P, U, Q, R)  # (Om_P, -k_U, Om_Q, -Om_R)
    x2 = _relation(P, V, R, Q)  # (Om_P, -k_V, Om_R, -Om_Q)
    x3 = _relation(Q, W, R, P)  # (Om_Q, -k_W, Om_R, -Om_P)
    if min(abs(x1[0]), abs(x2[0]), abs(x3[0])) < 1e-12 * np.abs(np.concatenate([x1, x2, x3])).max():
        raise NotAQuadric("corner weight relation is degenerate")
    # each relation alone fixes (Om_P, Om_Q, Om_R) up to scale; they must agree
    triples = [np.array([x1[0], x1[2], -x1[3]]),
               np.array([x2[0], -x2[3], x2[2]]),
               np.array([-x3[3], x3[0], x3[2]])]
    units = [tr / np.linalg.norm(tr) * np.sign(tr[0]) for tr in triples]
    mismatch = max(np.linalg.norm(units[0] - units[1]), np.linalg.norm(units[0] - units[2]))
    om_P, k_U, om_Q, om_R = x1[0], -x1[1], x1[2], -x1[3]
    k_V = -x2[1] * om_P / x2[0]
    k_W = -x3[1] * om_Q / x3[0]

    raw = [k * X for k, X in zip((k_U, k_V, k_W), (U, V, W))]
    proper = [abs(X[3]) > tol.tol_infinity * np.abs(X).max() for X in raw]
    Omega = [X[3] if pr else 1.0 for X, pr in zip(raw, proper)]
    # fix the common factor: largest proper Omega equals +1
    pool = [abs(o) for o, pr in zip(Omega, proper) if pr] or [abs(om_P), abs(om_Q), abs(om_R)]
    ref = max(pool)
    cand = [o for o, pr in zip(Omega, proper) if pr and abs(o) == ref] \
        or [o for o in (om_P, om_Q, om_R) if abs(o) == ref]
    factor = 1.0 / cand[0]
    raw = [factor * X for X in raw]
    Omega = [X[3] if pr else 1.0 for X, pr in zip(raw, proper)]
    return {
        "planes": (p, q, r, t),
        "points": tuple(raw) + (T.coords,),
        "Omega": tuple(float(o) for o in Omega),
        "Omega_corner": tuple(float(factor * o) for o in (om_P, om_Q, om_R)),
        "mismatch": float(mismatch),
    }


def _degenerate_form_residual(patch: TriPatch, data: dict, n: int = 7) -> float:
    from .patch import sample_patch
    p, q, r, _ = data["planes"]
    U, V, W, _ = data["points"]
    OU, OV, OW = data["Omega"]
    pn = p.coeffs / (p.coeffs @ W / OW)
    qn = q.coeffs / (q.coeffs @ V / OV)
    rn = r.coeffs / (r.coeffs @ U / OU)
    X = np.column_stack([sample_patch(patch, n), np.ones(n * n)])
    a, b, c = X @ pn / OW, X @ qn / OV, X @ rn / OU
    value = a * a + b * b + c * c - 2 * a * b - 2 * a * c - 2 * b * c
    size = a * a + b * b + c * c + 2 * np.abs(a * b) + 2 * np.abs(a * c) + 2 * np.abs(b * c)
    return float(np.max(np.abs(value) / np.maximum(size, 1e-300)))


def boundary_conic_centers(patch: TriPatch) -> tuple[np.ndarray, float]:
    """Centers of the boundary conics and their projective collinearity defect.

    The center of an arc with weights ``(w0, w1, w2)`` is the pole of the line
    at infinity in its plane: ``2 k b1 - b0 - b2`` (homogeneous, ``k =
    w1^2 / (w0 w2)``), a direction for parabolas.

    Returns
    -------
    centers : ndarray, shape (3, 4)
    defect : float
        Smallest singular value over the largest of the unit-row matrix; zero
        when the three centers are collinear.
    """
    centers = []
    for conic in boundaries(patch):
        b0, b1, b2 = (pt.coords for pt in conic.pts)
        w0, w1, w2 = conic.wts
        k = w1 * w1 / (w0 * w2)
        centers.append(2 * k * b1 - b0 - b2)
    centers = np.array(centers)
    s = np.linalg.svd(centers / np.linalg.norm(centers, axis=1, keepdims=True), compute_uv=False)
    return centers, float(s[-1] / s[0])


def detect_ruled_degenerate(patch: TriPatch, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when the patch lies on a cone or cylinder although no common point exists.

    Two checks: the three corner-weight chains agree, and the rank-3 form
    they define annihilates a grid of patch samples. Collinearity of the
    boundary-conic centers is reported by :func:`boundary_conic_centers` but
    is not used here: it holds for cylinders but not for cones in general.
    """
    try:
        data = degenerate_weights(patch, tol)
    except NotAQuadric:
        return False
    if data["mismatch"] > tol.tol_compat:
        return False
    return _degenerate_form_residual(patch, data) <= tol.tol_quadric


# --- tensor-product reduction -----------------------------------------------

def tp_to_tri(patch: TPPatch, tol: Tolerances = DEFAULT_TOL) -> CanonicalTri:
    """Triangular data on the same quadric as a biquadratic patch.

    The triangle uses the corners ``P = c00``, ``Q = c02``, ``R = c20`` and the
    two boundary arcs through P. The second intersection S of those arcs fixes
    their Moebius normalization; the tangent planes at Q and R come from the
    neighbouring tensor control points, which places ``U, V, W`` on the corner
    plane. The relations expressing U, V, W through P, Q, R then determine
    ``omega_w``, and ``H_w = omega_w S`` gives the missing ``w110`` and ``c110``.

    Raises
    ------
    NoSecondIntersection
        The two arcs through the corner are tangent there.
    NotAQuadric
        The recovered data are inconsistent.
    """
    pts, wts = patch.points, patch.weights
    H = lambda i, j: np.append(pts[i, j], 1.0)  # noqa: E731
    C = lambda i, j: wts[i, j] * H(i, j)  # noqa: E731
    P, Q, R = H(0, 0), H(0, 2), H(2, 0)
    try:
        u_plane = plane_through(P, H(0, 1), Q, tol=tol)
        plane_through(P, H(1, 0), R, tol=tol)
    except CollinearInput as exc:
        raise NotAQuadric(f"boundary conic is degenerate ({exc})") from None

    # second point of the v-arc (c00, c10, c20) on the plane of the u-arc
    b = float(u_plane(C(1, 0)))
    c = float(u_plane(C(2, 0)))
    scale = np.abs(u_plane.coeffs).max() * max(np.abs(C(1, 0)).max(), np.abs(C(2, 0)).max())
    if abs(b) <= 1e-12 * scale:
        raise NoSecondIntersection("the arcs through c00 are tangent there")
    # u(X(s)) = s (2b (1 - s) + c s): the second root is (1 - s, s) ~ (-c, 2b)
    s0, s1 = -c, 2 * b
    S_h = s0 * s0 * C(0, 0) + 2 * s0 * s1 * C(1, 0) + s1 * s1 * C(2, 0)
    S = HPoint(S_h).normalized(tol)
    s = S.canonical()
    rows_u = np.array([C(0, 0), C(0, 1), C(0, 2)])
    rows_v = np.array([C(0, 0), C(1, 0), C(2, 0)])
    coef_u = _decompose(s, rows_u)
    if np.linalg.norm(rows_u.T @ coef_u - s) > 1e-9 or _conic_residual(coef_u) > tol.tol_conic:
        raise NotAQuadric("boundary arcs through the corner meet only there")
    beta = _half_ratio(coef_u)
    alpha = _half_ratio(_decompose(s, rows_v))

    w002, w011, w020 = wts[0, 0], beta * wts[0, 1], beta**2 * wts[0, 2]
    w101, w200 = alpha * wts[1, 0], alpha**2 * wts[2, 0]
    Hu = w002 * P - 2 * w011 * H(0, 1) + w020 * Q
    Hv = w002 * P - 2 * w101 * H(1, 0) + w200 * R
    if S.is_proper(tol):
        rep, eps_S = np.append(S.affine(), 1.0), 1
    else:
        rep, eps_S = Hu.copy(), 0
    om_u = float(Hu @ rep / (rep @ rep))
    om_v = float(Hv @ rep / (rep @ rep))

    try:
        p = plane_through(P, H(0, 1), H(1, 0), tol=tol)
        q = plane_through(Q, H(0, 1), H(1, 2), tol=tol)
        r = plane_through(R, H(1, 0), H(2, 1), tol=tol)
        t = plane_through(P, Q, R, tol=tol)
        U, V, W = (meet3(*pl, tol=tol).coords for pl in ((p, q, t), (p, r, t), (q, r, t)))
    except (CollinearInput, DependentPlanes) as exc:
        raise NotAQuadric(f"tangent frame is degenerate ({exc})") from None

    # unknowns (k_U, k_V, k_W, omega_w):
    #   k_U U = w002 om_w P + w020 om_v Q - w200 om_u R   (and cyclic sign patterns)
    A = np.zeros((12, 4))
    rhs = np.zeros(12)
    signs = ((1, 1, -1), (1, -1, 1), (-1, 1, 1))
    for n, (X, (sp, sq, sr)) in enumerate(zip((U, V, W), signs)):
        A[4 * n:4 * n + 4, n] = X
        A[4 * n:4 * n + 4, 3] = -sp * w002 * P
        rhs[4 * n:4 * n + 4] = sq * w020 * om_v * Q + sr * w200 * om_u * R
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    if np.linalg.norm(A @ sol - rhs) > 1e-8 * max(np.linalg.norm(rhs), 1e-300):
        raise NotAQuadric("tangent-triangle relations are inconsistent")
    om_w = float(sol[3])

    C110 = 0.5 * (w200 * R + w020 * Q - om_w * rep)
    w110 = float(C110[3])
    if abs(w110) <= tol.tol_infinity * np.abs(C110).max():
        raise NotAQuadric("recovered control point c110 is at infinity")
    c110 = C110[:3] / w110
    for name, plane in (("q", q), ("r", r)):
        if abs(plane(np.append(c110, 1.0))) > 1e-8 * max(1.0, np.abs(c110).max()):
            raise NotAQuadric(f"recovered c110 is off the tangent plane {name}")

    tri = TriPatch(
        [pts[0, 0], pts[0, 1], pts[0, 2], pts[1, 0], c110, pts[2, 0]],
        [w002, w011, w020, w101, w110, w200],
    )
    return CanonicalTri(tri, HPoint(rep), om_u, om_v, om_w, eps_S, (alpha, beta, 1.0))
