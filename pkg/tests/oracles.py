"""Independent generators and fitters used as test oracles.

Nothing here imports the library's geometry; patches are produced from known
quadrics by a stereographic-type projection, and implicit equations are
recovered by brute-force SVD fitting of samples.
"""
from __future__ import annotations

import numpy as np

TRI_ORDER = ("002", "011", "020", "101", "110", "200")

# ---------------------------------------------------------------- quadric catalogue
# Canonical matrices (x, y, z, 1) and a parametrized point on each surface.


def _diag(*d):
    return np.diag(np.array(d, dtype=float))


def _paraboloid(sy):
    m = _diag(1, sy, 0, 0)
    m[2, 3] = m[3, 2] = -0.5
    return m


def _parabolic_cylinder():
    m = _diag(1, 0, 0, 0)
    m[1, 3] = m[3, 1] = -0.5
    return m


CATALOGUE = {
    "Ellipsoid": (_diag(1, 1, 1, -1),
                  lambda a, b: (np.sin(a) * np.cos(b), np.sin(a) * np.sin(b), np.cos(a))),
    "TwoSheetedHyperboloid": (_diag(-1, -1, 1, -1),
                              lambda a, b: (np.sinh(a) * np.cos(b), np.sinh(a) * np.sin(b), np.cosh(a))),
    "OneSheetedHyperboloid": (_diag(1, 1, -1, -1),
                              lambda a, b: (np.cosh(a) * np.cos(b), np.cosh(a) * np.sin(b), np.sinh(a))),
    "EllipticParaboloid": (_paraboloid(1.0), lambda a, b: (a, b, a * a + b * b)),
    "HyperbolicParaboloid": (_paraboloid(-1.0), lambda a, b: (a, b, a * a - b * b)),
    "Cone": (_diag(1, 1, -1, 0), lambda a, b: (a * np.cos(b), a * np.sin(b), a)),
    "EllipticCylinder": (_diag(1, 1, 0, -1), lambda a, b: (np.cos(b), np.sin(b), a)),
    "HyperbolicCylinder": (_diag(1, -1, 0, -1), lambda a, b: (np.cosh(a), np.sinh(a), b)),
    "ParabolicCylinder": (_parabolic_cylinder(), lambda a, b: (a, a * a, b)),
}


def random_rotation(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_affine(rng, anisotropic: bool = True) -> np.ndarray:
    """4x4 matrix ``X -> R D X + t`` acting on homogeneous columns."""
    m = np.eye(4)
    d = rng.uniform(0.6, 1.8, size=3) if anisotropic else np.ones(3)
    m[:3, :3] = random_rotation(rng) @ np.diag(d)
    m[:3, 3] = rng.uniform(-1.0, 1.0, size=3)
    return m


def transform_quadric(A: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Matrix of the image of ``X^T A X = 0`` under ``X -> M X``."""
    Mi = np.linalg.inv(M)
    return Mi.T @ A @ Mi


def coeffs_of(A: np.ndarray) -> np.ndarray:
    """Ten coefficients ``x^2, y^2, z^2, xy, xz, yz, x, y, z, 1`` of a 4x4 matrix."""
    return np.array([A[0, 0], A[1, 1], A[2, 2], 2 * A[0, 1], 2 * A[0, 2], 2 * A[1, 2],
                     2 * A[0, 3], 2 * A[1, 3], 2 * A[2, 3], A[3, 3]])


def coeffs_to_matrix(c) -> np.ndarray:
    """Inverse of :func:`coeffs_of`."""
    A, B, C, D, E, F, G, H, I, J = np.asarray(c, float)
    return np.array([[A, D / 2, E / 2, G / 2], [D / 2, B, F / 2, H / 2],
                     [E / 2, F / 2, C, I / 2], [G / 2, H / 2, I / 2, J]])


def same_up_to_scale(a, b) -> float:
    """Relative distance between two coefficient vectors modulo a nonzero factor."""
    a = np.asarray(a, float) / np.linalg.norm(a)
    b = np.asarray(b, float) / np.linalg.norm(b)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


# ---------------------------------------------------------------- projection patches

def _bilinear(A, S):
    AS = A @ S

    def K(X, Y):
        return (X @ AS) * Y + (Y @ AS) * X - (X @ A @ Y) * S
    return K


def projection_tri(A, S, corners):
    """Triangular net of ``Y(X) = 2(X.AS) X - (X^T A X) S`` over a triangle of points.

    ``corners = (X_u, X_v, X_w)`` are homogeneous 4-vectors; the image lies on
    the quadric ``A`` for any choice because S is on it. Returns
    ``(points (6, 3), weights (6,))`` in row order and the homogeneous net.
    """
    K = _bilinear(A, S)
    Xu, Xv, Xw = corners
    Y = {"200": K(Xu, Xu), "020": K(Xv, Xv), "002": K(Xw, Xw),
         "110": K(Xu, Xv), "101": K(Xu, Xw), "011": K(Xv, Xw)}
    H = np.array([Y[k] for k in TRI_ORDER])
    return H[:, :3] / H[:, 3:], H[:, 3].copy(), H


def projection_tp(A, S, X):
    """Biquadratic net of the same projection over a bilinear patch ``X[a][b]``."""
    K = _bilinear(A, S)
    binom = (1.0, 2.0, 1.0)
    H = np.zeros((3, 3, 4))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    H[a + c, b + d] += K(X[a][b], X[c][d])
    for m in range(3):
        for n in range(3):
            H[m, n] /= binom[m] * binom[n]
    return H[..., :3] / H[..., 3:], H[..., 3].copy(), H


def eval_tri_homog(H, u, v, w):
    """Direct evaluation of a homogeneous triangular net at one parameter."""
    mono = {"200": u * u, "020": v * v, "002": w * w, "110": 2 * u * v, "101": 2 * u * w,
            "011": 2 * v * w}
    return sum(mono[k] * H[i] for i, k in enumerate(TRI_ORDER))


def _unit_plane(a, b, c):
    n = np.cross(b - a, c - a)
    h = np.append(n, -n @ a)
    return h / np.linalg.norm(h)


def well_conditioned(pts, min_side: float = 0.1, min_sv: float = 0.02) -> bool:
    """Screen a triangular net: separated corners and well-separated corner tangent planes.

    The four planes (tangent planes at the corners from the control net and
    the plane of the corners) must be far from meeting in a line, and each
    tangent triangle vertex (meet of two tangent planes with the corner
    plane) must stay apart from the others.
    """
    P, Q, R = pts[0], pts[2], pts[5]
    if min(np.linalg.norm(P - Q), np.linalg.norm(Q - R), np.linalg.norm(P - R)) < min_side:
        return False
    planes = np.array([_unit_plane(pts[0], pts[1], pts[3]), _unit_plane(pts[2], pts[1], pts[4]),
                       _unit_plane(pts[5], pts[3], pts[4]), _unit_plane(P, Q, R)])
    sv = np.linalg.svd(planes, compute_uv=False)
    if sv[-1] < min_sv * sv[0]:
        return False
    verts = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        _, _, vt = np.linalg.svd(planes[[i, j, 3]])
        verts.append(vt[-1] / np.linalg.norm(vt[-1]))
    for a in range(3):
        for b in range(a + 1, 3):
            if min(np.linalg.norm(verts[a] - verts[b]), np.linalg.norm(verts[a] + verts[b])) < min_sv:
                return False
    return True


def random_rigid(rng) -> np.ndarray:
    """4x4 rotation plus translation."""
    return random_affine(rng, anisotropic=False)


def random_quadric_patch(rng, kind: str, min_weight: float = 0.05, max_tries: int = 200,
                         base=None, motion=random_affine, return_motion: bool = False):
    """A random triangular patch on a random affine image of a catalogue quadric.

    ``base = (A0, param)`` replaces the catalogue entry and ``motion(rng)``
    draws the 4x4 map applied to it. Returns ``(points, weights, A, H)``;
    rejects nets with tiny weights or nearly coincident corners so that the
    patch is well conditioned. With ``return_motion`` the map ``M`` is
    appended to the result.
    """
    A0, param = CATALOGUE[kind] if base is None else base
    for _ in range(max_tries):
        M = motion(rng)
        A = transform_quadric(A0, M)
        A = A / np.abs(A).max()
        S = M @ np.append(param(*rng.uniform(-1.2, 1.2, size=2)), 1.0)
        corners = [np.append(rng.uniform(-2.0, 2.0, size=3), 1.0) for _ in range(3)]
        pts, w, H = projection_tri(A, S, corners)
        if np.any(np.abs(H[:, 3]) < min_weight * np.abs(H).max()):
            continue
        if not np.all(np.isfinite(pts)) or np.abs(pts).max() > 50:
            continue
        if not well_conditioned(pts):
            continue
        return (pts, w, A, H, M) if return_motion else (pts, w, A, H)
    raise RuntimeError(f"could not generate a {kind} patch")


def ruled_degenerate_tri(rng, apex=None, max_tries: int = 200):
    """Cone or cylinder net without a common point.

    ``Y(u, v, w) = C(L(u, v, w)) + m(u, v, w) T`` where ``C`` is a conic arc,
    ``L`` a linear map to its parameter and ``m`` a quadratic form; ``T`` is
    the apex (proper) or the ruling direction (w = 0).
    """
    T = np.array([0.0, 0.0, 1.0, 0.0]) if apex is None else np.append(apex, 1.0)
    idx = [{"200": (0, 0), "020": (1, 1), "002": (2, 2), "110": (0, 1), "101": (0, 2),
            "011": (1, 2)}[k] for k in TRI_ORDER]
    for _ in range(max_tries):
        C = [np.append(rng.uniform(-1, 1, 2), [0.0, 1.0]) for _ in range(3)]
        C[1] = C[1] * rng.uniform(0.4, 1.4)
        L = rng.uniform(-1, 1, size=(2, 3)) + np.array([[1, 0, 0.5], [0, 1, 0.5]])
        Mq = rng.uniform(-1, 1, size=(3, 3))
        Mq = (Mq + Mq.T) / 2

        def conic(a, b):
            return a[0] * b[0] * C[0] + (a[0] * b[1] + a[1] * b[0]) * C[1] + a[1] * b[1] * C[2]

        H = np.array([conic(L[:, i], L[:, j]) + Mq[i, j] * T for i, j in idx])
        if np.any(np.abs(H[:, 3]) < 0.05 * np.abs(H).max()):
            continue
        pts = H[:, :3] / H[:, 3:]
        if np.abs(pts).max() > 50 or not well_conditioned(pts):
            continue
        return pts, H[:, 3].copy(), H
    raise RuntimeError("could not generate a ruled patch")


# ---------------------------------------------------------------- brute-force fitter

def monomials(X: np.ndarray) -> np.ndarray:
    x, y, z = X[:, 0], X[:, 1], X[:, 2]
    one = np.ones_like(x)
    return np.column_stack([x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, one])


def fit_quadric(X: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares implicit quadric through samples; returns ``(coeffs, s_min / s_max)``.

    Points are centred and scaled first so the fit is well conditioned; the
    coefficients are mapped back to the original coordinates.
    """
    X = np.asarray(X, float)
    c = X.mean(axis=0)
    s = np.abs(X - c).max()
    Y = (X - c) / s
    _, sv, vt = np.linalg.svd(monomials(Y))
    q = vt[-1]
    # back-substitute Y = (X - c)/s: build the matrix and conjugate
    A = np.array([[q[0], q[3] / 2, q[4] / 2, q[6] / 2],
                  [q[3] / 2, q[1], q[5] / 2, q[7] / 2],
                  [q[4] / 2, q[5] / 2, q[2], q[8] / 2],
                  [q[6] / 2, q[7] / 2, q[8] / 2, q[9]]])
    T = np.eye(4)
    T[:3, :3] /= s
    T[:3, 3] = -c / s
    return coeffs_of(T.T @ A @ T), float(sv[-1] / sv[0])


def tri_samples(H, n: int = 9) -> np.ndarray:
    """Cartesian samples of a homogeneous triangular net on a barycentric grid."""
    out = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            u, v = i / n, j / n
            y = eval_tri_homog(H, u, v, 1.0 - u - v)
            out.append(y[:3] / y[3])
    return np.array(out)
