"""Euclidean elements: principal planes, axes, revolution tests, vertex, cylinder axis.

Directions are written in a basis of three frame vectors, e.g.
``U-T, V-T, W-T`` when T is proper (a vertex at infinity contributes its own
direction instead of a difference). A direction ``x`` has frame coordinates
``Y x``; its diametral plane is ``F Y x`` in the ``(p, q, r, t)`` basis, and it
is principal when that plane is orthogonal to the direction itself, which is
the symmetric-definite problem ``M x = mu G x`` with ``M = Y^T F Y`` and ``G``
the Gram matrix of the basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .classify import QuadricClass, QuadricKind, center
from .config import DEFAULT_TOL, Tolerances
from .errors import DegenerateBasis, InconsistentDetection, NotACylinder, NotAParaboloid
from .forms import point_form
from .frame import QuadricFrame
from .projective import Basis, HPoint, LinForm, SymForm3, cubic_discriminant, solve_cubic

__all__ = [
    "GramBasis",
    "PrincipalFamily",
    "EuclideanElements",
    "gram",
    "principal_system",
    "cubic_coefficients",
    "diametral_plane",
    "principal_planes",
    "revolution_sphere",
    "discriminant_verdict",
    "paraboloid_vertex",
    "cylinder_axis",
    "euclidean_elements",
]

# frame coordinates (p, q, r, t) of the reference points
_UNIT = {"U": np.array([0.0, 0.0, 1.0, 0.0]), "V": np.array([0.0, 1.0, 0.0, 0.0]),
         "W": np.array([1.0, 0.0, 0.0, 0.0]), "T": np.array([0.0, 0.0, 0.0, 1.0])}


@dataclass(frozen=True, eq=False)
class GramBasis:
    """Euclidean basis built from the frame.

    Attributes
    ----------
    names : tuple of str
        Frame points spanning the basis, e.g. ``("U", "V", "W")``.
    origin : HPoint
        Proper frame point the differences are taken from.
    vectors : ndarray, shape (3, 3)
        Columns are the Cartesian basis vectors.
    frame_coords : ndarray, shape (4, 3)
        Columns are the ``(p, q, r, t)`` coordinates of the basis vectors.
    G : SymForm3
        Gram matrix of the columns of ``vectors``.
    """

    names: tuple
    origin: HPoint
    vectors: np.ndarray
    frame_coords: np.ndarray
    G: SymForm3


@dataclass(frozen=True, eq=False)
class PrincipalFamily:
    """Principal directions sharing one eigenvalue.

    ``planes`` holds the proper diametral planes of a basis of the
    eigenspace; a double eigenvalue gives a pencil, a triple one a bundle.
    It is empty for ``mu = 0`` (the plane at infinity or no plane at all).
    """

    mu: float
    multiplicity: int
    coefficients: np.ndarray
    directions: np.ndarray
    planes: tuple

    def member(self, coeffs) -> LinForm:
        """Plane of the family with the given combination of basis planes."""
        c = np.asarray(coeffs, dtype=float)
        return LinForm(sum(ci * pl.coeffs for ci, pl in zip(c, self.planes)))


@dataclass(frozen=True, eq=False)
class EuclideanElements:
    principal_planes: tuple
    axes: tuple
    mus: tuple
    is_revolution: bool
    is_sphere: bool
    families: tuple = ()
    vertex: HPoint | None = None
    cylinder_axis: tuple | None = None
    cubic: tuple = ()
    discriminant: float | None = None
    generalized_eigenvalues: tuple = ()
    revolution_axis: tuple | None = None
    flags: tuple = field(default_factory=tuple)


def gram(f: QuadricFrame, tol: Tolerances = DEFAULT_TOL) -> GramBasis:
    """Basis of directions and its Gram matrix.

    T is the origin when proper (``U-T, V-T, W-T``); otherwise W (``U-W,
    V-W, T``), then V, then U. A point at infinity enters as its own direction.

    Raises
    ------
    DegenerateBasis
        The three vectors are dependent.
    """
    eps = {"U": f.eps_U, "V": f.eps_V, "W": f.eps_W, "T": f.eps_T}
    reps = {"U": f.U.coords, "V": f.V.coords, "W": f.W.coords, "T": f.T.coords}
    origin = next((n for n in ("T", "W", "V", "U") if eps[n]), None)
    if origin is None:
        raise DegenerateBasis("all frame points are at infinity")
    names = tuple(n for n in ("U", "V", "W", "T") if n != origin)
    vecs, coords = [], []
    for n in names:
        vecs.append(reps[n][:3] - eps[n] * reps[origin][:3])
        coords.append(_UNIT[n] - eps[n] * _UNIT[origin])
    E = np.column_stack(vecs)
    G = E.T @ E
    d = 1.0 / np.sqrt(np.diag(G))
    eig = np.linalg.eigvalsh(G * np.outer(d, d))
    if eig[0] <= tol.tol_rank * 3.0:
        raise DegenerateBasis(f"frame vectors are dependent (Gram eigenvalues {eig})")
    return GramBasis(names, HPoint(reps[origin]), E, np.column_stack(coords), SymForm3(G, Basis.GRAM))


def principal_system(f: QuadricFrame, g: GramBasis, lam: float | None = None) -> np.ndarray:
    """Matrix ``M`` of ``M x = mu G x`` (the point form on pairs of basis directions)."""
    F = point_form(f, lam).matrix
    Y = g.frame_coords
    M = Y.T @ F @ Y
    return 0.5 * (M + M.T)


def cubic_coefficients(M: np.ndarray, G: np.ndarray) -> tuple[float, float, float, float]:
    """``(a3, a2, a1, a0)`` of ``det(M - mu G)`` by multilinear column expansion."""
    M = np.asarray(M)
    G = np.asarray(G)

    def det_cols(c0, c1, c2):
        return float(np.linalg.det(np.column_stack([c0, c1, c2])))

    m, gg = M.T, G.T
    a0 = det_cols(m[0], m[1], m[2])
    a1 = -(det_cols(gg[0], m[1], m[2]) + det_cols(m[0], gg[1], m[2]) + det_cols(m[0], m[1], gg[2]))
    a2 = det_cols(gg[0], gg[1], m[2]) + det_cols(gg[0], m[1], gg[2]) + det_cols(m[0], gg[1], gg[2])
    a3 = -det_cols(gg[0], gg[1], gg[2])
    return a3, a2, a1, a0


def _frame_to_cartesian(f: QuadricFrame, a: np.ndarray) -> np.ndarray:
    return f.forms.T @ a


def diametral_plane(f: QuadricFrame, v, g: GramBasis | None = None,
                    lam: float | None = None) -> LinForm | None:
    """Diametral (polar) plane of the direction with basis coefficients ``v``.

    Returns ``None`` when the direction is singular for the quadric (the axis
    direction of a cylinder), whose polar vanishes identically.
    """
    g = gram(f) if g is None else g
    a = point_form(f, lam).matrix @ g.frame_coords @ np.asarray(v, dtype=float)
    cart = _frame_to_cartesian(f, a)
    if np.linalg.norm(cart) <= 1e-12 * np.linalg.norm(a) * np.linalg.norm(f.forms):
        return None
    return LinForm(cart)


def _is_zero_mu(mu: float, scale: float, tol: Tolerances) -> bool:
    return abs(mu) <= tol.tol_cluster * max(scale, 1e-300)


def principal_planes(f: QuadricFrame, g: GramBasis, lam: float | None = None,
                     tol: Tolerances = DEFAULT_TOL) -> dict:
    """Solve the principal-plane cubic and extract eigen-directions and planes.

    Returns
    -------
    dict
        ``mus`` (roots with multiplicity), ``families``, ``planes`` (proper
        planes), ``cubic``, ``discriminant``, ``generalized_eigenvalues`` and
        ``eig_gap`` (largest distance from a cubic root to the symmetric
        generalized eigenvalues, a cross-check).
    """
    # unit-length basis vectors: same eigenvalues, better conditioned cubic
    D = np.diag(1.0 / np.sqrt(np.diag(g.G.matrix)))
    M = D @ principal_system(f, g, lam) @ D
    G = D @ g.G.matrix @ D
    coeffs = cubic_coefficients(M, G)
    mus = solve_cubic(*coeffs, tol=tol)
    if sum(k for _, k in mus) != 3:
        raise InconsistentDetection(f"principal cubic has non-real roots: {mus}")
    eig = scipy.linalg.eigh(M, G, eigvals_only=True)
    scale = max(abs(mu) for mu, _ in mus)
    expanded = sorted(mu for mu, k in mus for _ in range(k))
    eig_gap = float(np.max(np.abs(np.sort(eig) - np.array(expanded)))) / max(scale, 1e-300)

    Fm = point_form(f, lam).matrix
    families, planes = [], []
    for mu, k in mus:
        _, _, vt = np.linalg.svd(M - mu * G)
        X = vt[-k:].T  # null-space basis, columns
        if k > 1:
            # orthonormal in the Euclidean metric, so the spanned axes are perpendicular
            X = X @ np.linalg.inv(np.linalg.cholesky(X.T @ G @ X)).T
        X = D @ X
        dirs = (g.vectors @ X).T
        fam_planes = []
        if not _is_zero_mu(mu, scale, tol):
            for col in X.T:
                cart = _frame_to_cartesian(f, Fm @ g.frame_coords @ col)
                fam_planes.append(LinForm(cart))
        families.append(PrincipalFamily(float(mu), k, X, dirs, tuple(fam_planes)))
        planes.extend(fam_planes)
    return {
        "mus": tuple(mus),
        "families": tuple(families),
        "planes": tuple(planes),
        "cubic": tuple(float(c) for c in coeffs),
        "discriminant": float(cubic_discriminant(*coeffs)),
        "generalized_eigenvalues": tuple(float(e) for e in np.sort(eig)),
        "eig_gap": eig_gap,
    }


def _scaled_cubic(cubic) -> tuple[np.ndarray, float]:
    """Monic cubic in ``nu = mu / rho`` with ``rho`` the root-magnitude bound.

    The discriminant band is applied to this form, so it is unaffected by a
    common rescaling of the eigenvalues (e.g. a uniform spatial scaling).
    """
    a3, a2, a1, a0 = (float(c) for c in cubic)
    rho = max(abs(a2 / a3), abs(a1 / a3) ** 0.5, abs(a0 / a3) ** (1.0 / 3.0))
    if rho == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0]), 1.0
    return np.array([1.0, a2 / (a3 * rho), a1 / (a3 * rho ** 2), a0 / (a3 * rho ** 3)]), rho


def discriminant_verdict(mus, cubic, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, str | None]:
    """Whether the discriminant says a root repeats, with an optional borderline note.

    The discriminant of the scaled cubic is tested against
    ``tol_discriminant * ||coeffs||^4`` and compared with the discriminant
    implied by the clustered roots.

    Raises
    ------
    InconsistentDetection
        The clustered roots repeat while the discriminant is clearly nonzero,
        or the roots do not reproduce the discriminant of the coefficients.
    """
    c, rho = _scaled_cubic(cubic)
    disc = cubic_discriminant(*c)
    band = tol.tol_discriminant * np.linalg.norm(c) ** 4
    nu = [mu / rho for mu, k in mus for _ in range(k)]
    from_roots = float(np.prod([(nu[i] - nu[j]) ** 2 for i in range(3) for j in range(i + 1, 3)]))
    in_band = bool(abs(disc) <= band)
    repeated = any(k >= 2 for _, k in mus)
    if repeated and not in_band:
        raise InconsistentDetection(
            f"clustered roots repeat but the scaled discriminant {disc:.3g} exceeds {band:.3g}")
    if abs(disc - from_roots) > 1e-6 * np.linalg.norm(c) ** 4:
        raise InconsistentDetection(
            f"roots imply discriminant {from_roots:.3g}, coefficients give {disc:.3g}")
    note = None
    if in_band and not repeated:
        note = f"nearly repeated principal eigenvalue (scaled discriminant {disc:.3g})"
    return in_band, note


def revolution_sphere(mus, cubic, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, bool]:
    """Surface of revolution / sphere verdicts.

    A nonzero double root means revolution, a triple root a sphere (which is
    also reported as a surface of revolution). Both verdicts need the root
    clustering and the discriminant band to agree; see
    :func:`discriminant_verdict`.

    Raises
    ------
    InconsistentDetection
    """
    in_band, _ = discriminant_verdict(mus, cubic, tol)
    scale = max(abs(mu) for mu, _ in mus)
    nonzero_multiple = [k for mu, k in mus if k >= 2 and not _is_zero_mu(mu, scale, tol)]
    is_rev = bool(nonzero_multiple) and bool(in_band)
    return is_rev, is_rev and 3 in nonzero_multiple


def paraboloid_vertex(f: QuadricFrame, g: GramBasis | None = None, lam: float | None = None,
                      tol: Tolerances = DEFAULT_TOL) -> HPoint:
    """Vertex of a paraboloid: the pole of the tangent plane normal to the axis.

    With T proper the closed form in ``U, V, W, T`` is used: ``x`` are the
    basis coefficients of the center direction, ``(C, B, A) = G x`` and the
    tangent plane ``a p + b q + c r + d t`` has ``a = eps_W d + A``,
    ``b = eps_V d + B``, ``c = eps_U d + C``. Otherwise the vertex is computed
    from the Cartesian equation.

    Raises
    ------
    NotAParaboloid
        The center is proper or lam is zero.
    """
    lam = f.lam if lam is None else lam
    Z, _ = center(f, lam, tol)
    if lam == 0.0 or Z.is_proper(tol):
        raise NotAParaboloid("the quadric has a proper center")
    g = gram(f, tol) if g is None else g
    if g.names == ("U", "V", "W"):
        O = _vertex_closed_form(f, g)
    else:
        O = _vertex_cartesian(f, lam, Z)
    return HPoint(O / O[3])


def _vertex_closed_form(f: QuadricFrame, g: GramBasis) -> np.ndarray:
    OU, OV, OW = f.Omega_U, f.Omega_V, f.Omega_W
    eU, eV, eW = f.eps_U, f.eps_V, f.eps_W
    tU, tV, tW = f.Omega_tilde
    x = np.array([OU * (tV + tW), OV * (tW + tU), OW * (tU + tV)])
    C, B, A = g.G.matrix @ x
    num = OU * OV * B * C + OV * OW * A * B + OW * OU * A * C
    den = OU * OV * (eU * B + eV * C) + OV * OW * (eV * A + eW * B) + OW * OU * (eU * A + eW * C)
    d = -num / den
    a, b, c = eW * d + A, eV * d + B, eU * d + C
    pairs = tU * tV + tV * tW + tW * tU
    return ((b * OV + a * OW) * OU * f.U.coords + (c * OU + a * OW) * OV * f.V.coords
            + (c * OU + b * OV) * OW * f.W.coords - 2 * d * pairs * f.T.coords)


def _cartesian_form(f: QuadricFrame, lam: float) -> np.ndarray:
    L = f.forms
    return L.T @ point_form(f, lam).matrix @ L


def _vertex_cartesian(f: QuadricFrame, lam: float, Z: HPoint) -> np.ndarray:
    m = _cartesian_form(f, lam)
    A, gvec, c0 = m[:3, :3], 2 * m[:3, 3], m[3, 3]
    d = Z.coords[:3] / np.linalg.norm(Z.coords[:3])
    kappa = d @ gvec
    # gradient 2 A X + g parallel to the axis: 2 A X = kappa d - g, then F = 0 along the axis
    X0, *_ = np.linalg.lstsq(2 * A, kappa * d - gvec, rcond=None)
    F0 = X0 @ A @ X0 + gvec @ X0 + c0
    X = X0 - F0 / kappa * d
    return np.append(X, 1.0)


def cylinder_axis(f: QuadricFrame, lam: float | None = None, g: GramBasis | None = None,
                  tol: Tolerances = DEFAULT_TOL) -> tuple[HPoint, HPoint, bool]:
    """Axis of a cylinder as ``(point, direction T, best_effort)``.

    The point is the center of the corner conic. For a parabolic cylinder that
    center is at infinity; the line where the plane of symmetry meets the
    surface is returned instead, flagged as best effort.

    Raises
    ------
    NotACylinder
    """
    lam = f.lam if lam is None else lam
    if lam != 0.0 or f.eps_T:
        raise NotACylinder("the quadric is not a cylinder")
    OtU, OtV, OtW = f.Omega_tilde
    terms = [OtW * f.Omega_P * f.P.coords, OtV * f.Omega_Q * f.Q.coords, OtU * f.Omega_R * f.R.coords]
    raw = np.sum(terms, axis=0)
    direction = HPoint(np.append(f.T.coords[:3] / np.linalg.norm(f.T.coords[:3]), 0.0))
    if abs(raw[3]) > tol.tol_center * sum(abs(x[3]) for x in terms):
        return HPoint(raw / raw[3]), direction, False
    g = gram(f, tol) if g is None else g
    pp = principal_planes(f, g, lam, tol)
    plane = next(iter(pp["planes"]), None)
    if plane is None:
        raise NotACylinder("no proper plane of symmetry")
    n, e = plane.coeffs[:3], plane.coeffs[3]
    t_dir = direction.coords[:3]
    m_dir = np.cross(n, t_dir)
    m_dir /= np.linalg.norm(m_dir)
    X0 = -e * n / (n @ n)
    mm = _cartesian_form(f, lam)
    h0 = np.append(X0, 1.0)
    hm = np.append(m_dir, 0.0)
    qa, qb, qc = hm @ mm @ hm, 2 * hm @ mm @ h0, h0 @ mm @ h0
    s = -qc / qb if abs(qa) <= 1e-12 * (abs(qb) + abs(qc)) else -qb / (2 * qa)
    return HPoint.from_affine(X0 + s * m_dir), direction, True


def euclidean_elements(f: QuadricFrame, klass: QuadricClass,
                       tol: Tolerances = DEFAULT_TOL) -> EuclideanElements:
    """All Euclidean elements for a classified quadric."""
    lam = klass.lam
    g = gram(f, tol)
    pp = principal_planes(f, g, lam, tol)
    flags = []
    if pp["eig_gap"] > 1e-6:
        flags.append(f"cubic roots and generalized eigenvalues differ by {pp['eig_gap']:.3g}")
    is_rev, is_sphere = revolution_sphere(pp["mus"], pp["cubic"], tol)
    _, note = discriminant_verdict(pp["mus"], pp["cubic"], tol)
    if note:
        flags.append(note)

    vertex, cyl, rev_axis = None, None, None
    axes = []
    scale = max(abs(mu) for mu, _ in pp["mus"])
    nonzero_dirs = [d for fam in pp["families"] if not _is_zero_mu(fam.mu, scale, tol)
                    for d in fam.directions]
    if klass.kind.is_paraboloid:
        vertex = paraboloid_vertex(f, g, lam, tol)
        axis_dir = klass.center.coords[:3]
        axes.append((vertex, HPoint.direction(axis_dir / np.linalg.norm(axis_dir))))
        through = vertex
    elif klass.kind.is_cylinder:
        point, direction, best = cylinder_axis(f, lam, g, tol)
        cyl = (point, direction)
        if best:
            flags.append("cylinder axis is best effort (parabolic cylinder)")
        axes.append(cyl)
        through = point
    else:
        through = klass.center if klass.kind.is_central else HPoint(f.T.coords)
        for d in nonzero_dirs:
            axes.append((through, HPoint.direction(d / np.linalg.norm(d))))
        vertex = through if klass.kind is QuadricKind.CONE else None

    if is_rev and not is_sphere:
        simple = [fam for fam in pp["families"] if fam.multiplicity == 1]
        if simple:
            d = simple[0].directions[0]
            rev_axis = (through, HPoint.direction(d / np.linalg.norm(d)))
    return EuclideanElements(
        principal_planes=pp["planes"], axes=tuple(axes), mus=pp["mus"],
        is_revolution=is_rev, is_sphere=is_sphere, families=pp["families"], vertex=vertex,
        cylinder_axis=cyl, cubic=pp["cubic"], discriminant=pp["discriminant"],
        generalized_eigenvalues=pp["generalized_eigenvalues"], revolution_axis=rev_axis,
        flags=tuple(flags),
    )
