"""Pencil parameter, point and tangential forms, and Cartesian implicit equations.

In frame coordinates ``(p, q, r, t)`` the quadric through the patch is

    p^2/Om_W^2 + q^2/Om_V^2 + r^2/Om_U^2
        - 2pq/(Om_W Om_V) - 2pr/(Om_W Om_U) - 2qr/(Om_V Om_U) + lam t^2,

the member of the pencil spanned by the tangent cone along the corner conic
and the doubled corner plane that passes through S. In plane coordinates on
``(U, V, W, T)`` the tangential form is
``(Om_U Om_V UV + Om_U Om_W UW + Om_V Om_W VW)/2 - T^2/lam``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DependentForms
from .frame import QuadricFrame
from .patch import BoundaryConic
from .projective import Basis, HPoint, SymForm4

__all__ = [
    "ImplicitQuadric",
    "MONOMIALS",
    "lambda_terms",
    "compute_lambda",
    "lambda_from_common_point",
    "corner_conic_matrix",
    "point_form",
    "tangential_form",
    "to_cartesian",
    "coeffs_to_matrix",
    "matrix_to_coeffs",
    "normalize_coeffs",
    "canonical_conic_weight",
    "conic_type",
    "corner_conic_arc",
]

#: Monomial order of the 10 implicit coefficients (A..J).
MONOMIALS = ("x^2", "y^2", "z^2", "xy", "xz", "yz", "x", "y", "z", "1")


def matrix_to_coeffs(m: np.ndarray) -> np.ndarray:
    """``(A, ..., J)`` of ``X^T m X`` with ``X = (x, y, z, 1)``."""
    return np.array([m[0, 0], m[1, 1], m[2, 2], 2 * m[0, 1], 2 * m[0, 2], 2 * m[1, 2],
                     2 * m[0, 3], 2 * m[1, 3], 2 * m[2, 3], m[3, 3]])


def coeffs_to_matrix(c) -> np.ndarray:
    A, B, C, D, E, F, G, H, I, J = np.asarray(c, dtype=float)
    return np.array([[A, D / 2, E / 2, G / 2],
                     [D / 2, B, F / 2, H / 2],
                     [E / 2, F / 2, C, I / 2],
                     [G / 2, H / 2, I / 2, J]])


def normalize_coeffs(c, rel: float = 1e-12) -> tuple[np.ndarray, float]:
    """Scale so the largest magnitude is 1 and the first significant entry is positive.

    Returns the normalized vector and the factor it was multiplied by.
    """
    c = np.asarray(c, dtype=float)
    big = np.abs(c).max()
    if big == 0.0:
        raise ValueError("all implicit coefficients vanish")
    first = np.flatnonzero(np.abs(c) > rel * big)[0]
    factor = np.sign(c[first]) / big
    return c * factor, float(factor)


@dataclass(frozen=True, eq=False)
class ImplicitQuadric:
    """Cartesian quadric ``Ax^2+By^2+Cz^2+Dxy+Exz+Fyz+Gx+Hy+Iz+J = 0``.

    ``matrix`` is scaled consistently with the normalized ``coeffs10``;
    ``tangential`` is the Cartesian plane form of the same quadric, defined
    up to its own factor.
    """

    coeffs10: np.ndarray
    matrix: SymForm4
    tangential: SymForm4
    lam: float

    def __call__(self, X) -> np.ndarray:
        """Evaluate F at Cartesian points of shape ``(..., 3)``."""
        X = np.asarray(X, dtype=float)
        Xh = np.concatenate([X, np.ones(X.shape[:-1] + (1,))], axis=-1)
        return self.matrix(Xh)

    def normalized_residual(self, X) -> np.ndarray:
        """``|F(X)| / (||coeffs|| (1 + ||X||^2))``, the scale-free residual."""
        X = np.asarray(X, dtype=float)
        return np.abs(self(X)) / (np.linalg.norm(self.coeffs10) * (1.0 + np.sum(X * X, axis=-1)))

    def as_tuple(self) -> tuple:
        return tuple(float(c) for c in self.coeffs10)

    def equation(self, digits: int = 6) -> str:
        terms = []
        for c, mono in zip(self.coeffs10, MONOMIALS):
            if abs(c) < 10.0 ** (-digits):
                continue
            mag = f"{abs(c):.{digits}g}"
            body = mag if mono == "1" else (mono if mag == "1" else f"{mag}*{mono}")
            terms.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(terms) or "0"
        return (text[2:] if text.startswith("+ ") else "-" + text[2:]) + " = 0"


# --- pencil parameter --------------------------------------------------------

def lambda_terms(f: QuadricFrame) -> tuple[float, float, float]:
    """Numerator N, denominator D and the magnitude of N's terms.

    ``lam = -N / D^2`` with
    ``N = ou^2 + ov^2 + ow^2 - 2 ou ov - 2 ov ow - 2 ow ou`` and
    ``D = 2 eps_S ou ov ow - eps_U Om_U ou - eps_V Om_V ov - eps_W Om_W ow``,
    the weight of T. With T at infinity that weight is taken to be one.
    """
    ou, ov, ow = f.omega_u, f.omega_v, f.omega_w
    N = ou * ou + ov * ov + ow * ow - 2 * ou * ov - 2 * ov * ow - 2 * ow * ou
    size = ou * ou + ov * ov + ow * ow + 2 * abs(ou * ov) + 2 * abs(ov * ow) + 2 * abs(ow * ou)
    if f.eps_T:
        D = (2 * f.eps_S * ou * ov * ow - f.eps_U * f.Omega_U * ou
             - f.eps_V * f.Omega_V * ov - f.eps_W * f.Omega_W * ow)
    else:
        D = 1.0
    return N, D, size


def compute_lambda(f: QuadricFrame, tol: Tolerances = DEFAULT_TOL) -> float:
    """Pencil parameter of the quadric; exactly 0.0 for cones and cylinders.

    Frames built without a common point already carry ``lam = 0``.
    """
    if f.degenerate:
        return 0.0
    N, D, size = lambda_terms(f)
    if abs(N) <= tol.tol_lambda * size:
        return 0.0
    return float(-N / (D * D))


def corner_conic_matrix(f: QuadricFrame) -> np.ndarray:
    """4x4 frame-basis matrix of the tangent cone along the corner conic (no t term)."""
    iW, iV, iU = 1.0 / f.Omega_W, 1.0 / f.Omega_V, 1.0 / f.Omega_U
    m = np.zeros((4, 4))
    m[:3, :3] = [[iW * iW, -iW * iV, -iW * iU],
                 [-iW * iV, iV * iV, -iV * iU],
                 [-iW * iU, -iV * iU, iU * iU]]
    return m


def lambda_from_common_point(f: QuadricFrame) -> float:
    """Pencil parameter read off directly as ``-K(S) / t(S)^2``.

    ``K`` is the tangent-cone form; this is an independent route to the same
    value, used as a cross-check.
    """
    if f.S is None:
        raise ValueError("frame has no common point")
    y = f.forms @ f.S.coords
    return float(-(y @ corner_conic_matrix(f) @ y) / y[3] ** 2)


def point_form(f: QuadricFrame, lam: float | None = None) -> SymForm4:
    """Point form in frame coordinates ``(p, q, r, t)``."""
    lam = f.lam if lam is None else lam
    m = corner_conic_matrix(f)
    m[3, 3] = lam
    return SymForm4(m, Basis.FRAME)


def tangential_form(f: QuadricFrame, lam: float | None = None) -> SymForm4:
    """Tangential form in plane coordinates on ``(U, V, W, T)``.

    For ``lam = 0`` the ``T^2`` term is dropped.
    """
    lam = f.lam if lam is None else lam
    UV, UW, VW = (0.5 * f.Omega_U * f.Omega_V, 0.5 * f.Omega_U * f.Omega_W, 0.5 * f.Omega_V * f.Omega_W)
    m = np.array([[0.0, UV, UW, 0.0],
                  [UV, 0.0, VW, 0.0],
                  [UW, VW, 0.0, 0.0],
                  [0.0, 0.0, 0.0, 0.0 if lam == 0.0 else -1.0 / lam]])
    return SymForm4(m, Basis.FRAME_DUAL)


def to_cartesian(f: QuadricFrame, frame_form: SymForm4 | None = None,
                 lam: float | None = None, tol: Tolerances = DEFAULT_TOL) -> ImplicitQuadric:
    """Substitute the Cartesian coefficients of ``p, q, r, t`` into the frame form.

    Raises
    ------
    DependentForms
        If ``p, q, r, t`` are linearly dependent.
    """
    lam = f.lam if lam is None else lam
    frame_form = point_form(f, lam) if frame_form is None else frame_form
    L = f.forms
    s = np.linalg.svd(L / np.linalg.norm(L, axis=1, keepdims=True), compute_uv=False)
    if s[-1] <= tol.tol_rank * s[0]:
        raise DependentForms("frame planes p, q, r, t are dependent")
    raw = L.T @ frame_form.matrix @ L
    coeffs, factor = normalize_coeffs(matrix_to_coeffs(raw))
    X = f.points
    tang = X @ tangential_form(f, lam).matrix @ X.T
    tang = tang / np.abs(tang).max()
    return ImplicitQuadric(coeffs, SymForm4(raw * factor, Basis.CARTESIAN),
                           SymForm4(tang, Basis.CARTESIAN_DUAL), float(lam))


# --- conic types --------------------------------------------------------------

def canonical_conic_weight(c: BoundaryConic) -> float:
    """Canonical weight ``w1 / sqrt(w0 w2)`` of a conic arc.

    When ``w0 w2 < 0`` the arc crosses infinity and ``|w1| / sqrt|w0 w2|`` is
    returned; such an arc is always a hyperbola (see :func:`conic_type`).
    """
    w0, w1, w2 = c.wts
    if w0 * w2 > 0:
        return float(w1 / np.sqrt(w0 * w2))
    return float(abs(w1) / np.sqrt(abs(w0 * w2)))


def conic_type(w0: float, w1: float, w2: float, tol: Tolerances = DEFAULT_TOL) -> str:
    """Affine type of a conic arc from its end weights and the weight of its middle point.

    ``w1`` is the w-coordinate of the weighted middle control point, which is
    zero when that point is at infinity. The arc's denominator has a double
    root for a parabola, two real roots for a hyperbola and none for an ellipse.
    """
    disc = w1 * w1 - w0 * w2
    if abs(disc) <= tol.tol_classify * (w1 * w1 + abs(w0 * w2)):
        return "parabola"
    return "hyperbola" if disc > 0 else "ellipse"


def corner_conic_arc(f: QuadricFrame) -> BoundaryConic | None:
    """Arc ``P, U, Q`` of the corner conic with weights ``Om_P, Om_U/2, Om_Q``.

    Returns ``None`` when U is at infinity (the arc has no proper middle point).
    """
    if not f.eps_U:
        return None
    return BoundaryConic((f.P, HPoint(f.U.coords), f.Q), (f.Omega_P, 0.5 * f.Omega_U, f.Omega_Q))
