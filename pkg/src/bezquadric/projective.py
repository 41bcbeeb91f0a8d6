"""Homogeneous points, plane forms and symmetric bilinear forms in real projective 3-space.

Points are ``(x, y, z, w)`` with ``w = 0`` for points at infinity; planes are
linear functionals ``(a, b, c, d)`` evaluated as ``ax + by + cz + dw``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import CollinearInput, DegeneratePolynomial, DependentPlanes

__all__ = [
    "HPoint",
    "LinForm",
    "Basis",
    "SymForm",
    "SymForm3",
    "SymForm4",
    "canonical_sign",
    "plane_through",
    "meet3",
    "adjugate",
    "signature",
    "cubic_discriminant",
    "solve_cubic",
]


def _frozen(values, size: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (size,):
        raise ValueError(f"{name} needs {size} coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite coordinates: {arr}")
    if not np.any(arr):
        raise ValueError(f"{name} cannot have all coordinates zero")
    arr.flags.writeable = False
    return arr


def canonical_sign(vec: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Unit-norm copy of ``vec`` whose first significant entry is positive."""
    vec = np.asarray(vec, dtype=float)
    vec = vec / np.linalg.norm(vec)
    significant = np.flatnonzero(np.abs(vec) > rel)
    if significant.size and vec[significant[0]] < 0:
        vec = -vec
    return vec


@dataclass(frozen=True, eq=False)
class HPoint:
    """Homogeneous point of projective 3-space.

    The stored representative is kept as given; formulas that depend on the
    scale of a representative (for instance an improper point whose weight is
    taken to be one) read ``coords`` directly.
    """

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords, 4, "HPoint"))

    @classmethod
    def from_affine(cls, xyz) -> "HPoint":
        return cls(np.append(np.asarray(xyz, dtype=float), 1.0))

    @classmethod
    def direction(cls, vec) -> "HPoint":
        return cls(np.append(np.asarray(vec, dtype=float), 0.0))

    @property
    def w(self) -> float:
        return float(self.coords[3])

    def is_proper(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        """The epsilon flag: True for a proper point, False for a direction."""
        return bool(abs(self.coords[3]) > tol.tol_infinity * np.abs(self.coords).max())

    def eps(self, tol: Tolerances = DEFAULT_TOL) -> int:
        return int(self.is_proper(tol))

    def affine(self) -> np.ndarray:
        """Cartesian coordinates; raises for points at infinity."""
        if self.coords[3] == 0.0:
            raise ValueError("point at infinity has no affine coordinates")
        return self.coords[:3] / self.coords[3]

    def vector(self) -> np.ndarray:
        """Spatial part of the representative (the direction of an improper point)."""
        return np.array(self.coords[:3])

    def canonical(self) -> np.ndarray:
        """Unit-norm representative with the first nonzero coordinate positive."""
        return canonical_sign(self.coords)

    def normalized(self, tol: Tolerances = DEFAULT_TOL) -> "HPoint":
        """``w = 1`` representative for proper points, unit direction otherwise."""
        if self.is_proper(tol):
            return HPoint(self.coords / self.coords[3])
        return HPoint(np.append(canonical_sign(self.coords[:3]), 0.0))

    def same_as(self, other: "HPoint", rtol: float = 1e-9) -> bool:
        """Projective equality: the representatives are proportional."""
        a, b = self.canonical(), other.canonical()
        return bool(min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= rtol)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype)

    def __repr__(self) -> str:
        return f"HPoint({', '.join(f'{c:.12g}' for c in self.coords)})"


@dataclass(frozen=True, eq=False)
class LinForm:
    """Plane ``ax + by + cz + dw = 0`` viewed as a linear functional."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, 4, "LinForm"))

    def __call__(self, X):
        """Evaluate on an HPoint, a 4-vector, or an ``(..., 4)`` array."""
        if isinstance(X, HPoint):
            return float(self.coeffs @ X.coords)
        return np.asarray(X, dtype=float) @ self.coeffs

    def scaled(self, factor: float) -> "LinForm":
        return LinForm(self.coeffs * factor)

    def canonical(self) -> np.ndarray:
        return canonical_sign(self.coeffs)

    def unit_normal(self) -> np.ndarray:
        """Coefficients scaled so the spatial normal has unit length, sign canonical."""
        n = np.linalg.norm(self.coeffs[:3])
        if n == 0.0:
            raise ValueError("the plane at infinity has no normal")
        vec = self.coeffs / n
        return vec if vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]] > 0 else -vec

    def same_as(self, other: "LinForm", rtol: float = 1e-9) -> bool:
        a, b = self.canonical(), other.canonical()
        return bool(min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= rtol)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coeffs, dtype=dtype)

    def __repr__(self) -> str:
        return f"LinForm({', '.join(f'{c:.12g}' for c in self.coeffs)})"


class Basis(str, enum.Enum):
    """Coordinate system a symmetric form is written in."""

    CARTESIAN = "cartesian"            # points (x, y, z, 1)
    CARTESIAN_DUAL = "cartesian_dual"  # planes (a, b, c, d)
    FRAME = "frame"                    # point coordinates (p, q, r, t)
    FRAME_DUAL = "frame_dual"          # plane coordinates on (U, V, W, T)
    CORNER_CONIC = "corner_conic"      # conic on the corner plane
    INFINITY = "infinity"              # conic at infinity
    GRAM = "gram"                      # Euclidean dot products

    def dual(self) -> "Basis":
        swap = {
            Basis.CARTESIAN: Basis.CARTESIAN_DUAL,
            Basis.CARTESIAN_DUAL: Basis.CARTESIAN,
            Basis.FRAME: Basis.FRAME_DUAL,
            Basis.FRAME_DUAL: Basis.FRAME,
        }
        return swap.get(self, self)


@dataclass(frozen=True, eq=False)
class SymForm:
    """Symmetric bilinear form stored as an exactly symmetric matrix."""

    matrix: np.ndarray
    basis: Basis = Basis.CARTESIAN

    dim = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"symmetric form needs a square matrix, got {m.shape}")
        if self.dim is not None and m.shape[0] != self.dim:
            raise ValueError(f"{type(self).__name__} needs a {self.dim}x{self.dim} matrix")
        m = 0.5 * (m + m.T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "basis", Basis(self.basis))

    def __call__(self, x, y=None):
        x = np.asarray(x, dtype=float)
        y = x if y is None else np.asarray(y, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.matrix, y)

    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def scaled(self, factor: float) -> "SymForm":
        return type(self)(self.matrix * factor, self.basis)

    def congruent(self, change: np.ndarray, basis: Basis | None = None) -> "SymForm":
        """Return ``change.T @ M @ change``."""
        change = np.asarray(change, dtype=float)
        out = change.T @ self.matrix @ change
        cls = {3: SymForm3, 4: SymForm4}.get(out.shape[0], SymForm)
        return cls(out, self.basis if basis is None else basis)


class SymForm4(SymForm):
    dim = 4


class SymForm3(SymForm):
    dim = 3


def _null_vector(rows: np.ndarray, tol: float, exc, what: str) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    scale = np.linalg.norm(rows, axis=1, keepdims=True)
    if np.any(scale == 0.0):
        raise exc(f"{what}: zero input vector")
    _, s, vt = np.linalg.svd(rows / scale)
    if s[-1] <= tol * s[0]:
        raise exc(f"{what}: rank < 3 (singular values {s})")
    return vt[-1]


def plane_through(p1: HPoint, p2: HPoint, p3: HPoint, tol: Tolerances = DEFAULT_TOL) -> LinForm:
    """Plane through three points, unit-norm with canonical sign.

    Raises
    ------
    CollinearInput
        If the points do not span a plane.
    """
    rows = [np.asarray(p, dtype=float) for p in (p1, p2, p3)]
    vec = _null_vector(rows, tol.tol_rank, CollinearInput, "plane_through")
    return LinForm(canonical_sign(vec))


def meet3(l1: LinForm, l2: LinForm, l3: LinForm, tol: Tolerances = DEFAULT_TOL) -> HPoint:
    """Common point of three planes.

    Proper results are returned with ``w = 1``; points at infinity as unit
    directions with canonical sign.

    Raises
    ------
    DependentPlanes
        If the planes share a line.
    """
    rows = [np.asarray(l, dtype=float) for l in (l1, l2, l3)]
    vec = _null_vector(rows, tol.tol_rank, DependentPlanes, "meet3")
    return HPoint(vec).normalized(tol)


def adjugate(f: SymForm) -> SymForm:
    """Adjugate (transposed cofactor matrix), valid for singular forms too.

    The basis tag flips between point and tangential coordinates.
    """
    m = f.matrix
    n = m.shape[0]
    adj = np.empty_like(m)
    idx = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = m[np.ix_(idx != j, idx != i)]
            adj[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return type(f)(adj, f.basis.dual())


def signature(f: SymForm, tol: Tolerances = DEFAULT_TOL) -> tuple[int, int, int]:
    """Inertia ``(n_plus, n_minus, n_zero)`` from a symmetric eigendecomposition."""
    eig = np.linalg.eigvalsh(f.matrix)
    scale = np.abs(eig).max()
    if scale == 0.0:
        return 0, 0, len(eig)
    cut = tol.tol_rank * scale
    plus = int(np.sum(eig > cut))
    minus = int(np.sum(eig < -cut))
    return plus, minus, len(eig) - plus - minus


def cubic_discriminant(a3: float, a2: float, a1: float, a0: float) -> float:
    """Discriminant of ``a3 x^3 + a2 x^2 + a1 x + a0``; zero iff a root repeats."""
    return (
        18.0 * a3 * a2 * a1 * a0
        - 4.0 * a2**3 * a0
        + a2**2 * a1**2
        - 4.0 * a3 * a1**3
        - 27.0 * a3**2 * a0**2
    )


# Relative noise floor of polynomial coefficients assembled from determinants.
_COEFF_NOISE = 1e-13


def _polyval(c, x):
    return np.polyval(c, x)


def _merge_clusters(roots: list[float], tol: Tolerances) -> list[list[float]]:
    groups: list[list[float]] = []
    for r in sorted(roots):
        if groups:
            last = groups[-1][-1]
            if abs(r - last) <= tol.tol_cluster * max(1.0, abs(r) + abs(last)):
                groups[-1].append(r)
                continue
        groups.append([r])
    return groups


def _newton(c, dc, r, steps=3):
    best, best_res = r, abs(_polyval(c, r))
    for _ in range(steps):
        d = _polyval(dc, best)
        if d == 0.0:
            break
        cand = best - _polyval(c, best) / d
        res = abs(_polyval(c, cand))
        if res >= best_res:
            break
        best, best_res = cand, res
    return best


def solve_cubic(a3: float, a2: float, a1: float, a0: float,
                tol: Tolerances = DEFAULT_TOL) -> list[tuple[float, int]]:
    """Real roots of ``a3 x^3 + a2 x^2 + a1 x + a0`` with multiplicities.

    Simple roots come from the eigenvalues of the companion matrix, polished
    by Newton steps. Repeated roots are poorly conditioned as eigenvalues (a
    triple root spreads by about ``eps**(1/3)``), so multiplicity is decided
    first by a backward-error test: the polynomial is accepted as having a
    root of multiplicity ``k`` when a coefficient perturbation of relative
    size ``max(tol_cluster**k, noise)`` produces one, and that root is then
    read off the derivatives, where it is simple. Remaining eigenvalues are
    clustered with radius ``tol_cluster``.

    Returns
    -------
    list of (root, multiplicity)
        Sorted by root; lower degree when leading coefficients vanish exactly.
    """
    c = np.array([a3, a2, a1, a0], dtype=float)
    if not np.all(np.isfinite(c)):
        raise ValueError("cubic coefficients must be finite")
    if a3 == 0.0 and a2 == 0.0 and a1 == 0.0:
        raise DegeneratePolynomial("a3 = a2 = a1 = 0")
    c = np.trim_zeros(c, "f")
    deg = len(c) - 1
    if deg == 1:
        return [(-c[1] / c[0], 1)]
    # work with x = rho * y, rho bounding the roots, so all tests are scale free
    rho = max(abs(c[k] / c[0]) ** (1.0 / k) for k in range(1, deg + 1))
    if rho == 0.0:
        return [(0.0, deg)]
    if rho != 1.0:
        # divide by rho one power at a time; rho**k can underflow
        y = c / c[0]
        for k in range(1, deg + 1):
            y[k:] /= rho
        scaled = _solve_scaled(y, deg, tol)
        return [(float(r * rho), k) for r, k in scaled]
    return _solve_scaled(c, deg, tol)


def _solve_scaled(c: np.ndarray, deg: int, tol: Tolerances) -> list[tuple[float, int]]:
    dc = np.polyder(c)
    cmax = np.abs(c).max()

    def scale(r):
        return cmax * max(1.0, abs(r)) ** deg

    tau2 = max(tol.tol_cluster**2, _COEFF_NOISE)
    tau3 = max(tol.tol_cluster**3, _COEFF_NOISE)

    if deg == 3:
        m = -c[1] / (3.0 * c[0])
        if (abs(_polyval(c, m)) <= tau3 * scale(m)
                and abs(_polyval(dc, m)) * max(1.0, abs(m)) <= tau2 * scale(m)):
            return [(float(m), 3)]

    # double roots sit on simple roots of the derivative
    for r1 in _real_quadratic_roots(dc) if deg == 3 else [-c[1] / (2.0 * c[0])]:
        if abs(_polyval(c, r1)) <= tau2 * scale(r1):
            if deg == 2:
                return [(float(r1), 2)]
            r3 = -c[1] / c[0] - 2.0 * r1
            return sorted([(float(r1), 2), (float(_newton(c, dc, r3)), 1)])

    companion = np.zeros((deg, deg))
    companion[0, :] = -c[1:] / c[0]
    companion[1:, :-1] = np.eye(deg - 1)
    eig = np.linalg.eigvals(companion)
    real = [float(z.real) for z in eig
            if abs(z.imag) <= tol.tol_cluster * max(1.0, abs(z.real))]

    out = []
    for group in _merge_clusters(real, tol):
        k = len(group)
        r = float(np.mean(group))
        if k == 1:
            r = _newton(c, dc, r)
        elif k == 2 and deg == 3:
            cands = _real_quadratic_roots(dc)
            if cands:
                r = min(cands, key=lambda x: abs(x - r))
        out.append((float(r), k))
    return sorted(out)


def _real_quadratic_roots(c) -> list[float]:
    """Real roots of ``c[0] x^2 + c[1] x + c[2]`` (stable formula)."""
    a, b, cc = (float(v) for v in c)
    if a == 0.0:
        return [] if b == 0.0 else [-cc / b]
    disc = b * b - 4.0 * a * cc
    if disc < 0.0:
        # a tangential double root may show up with a tiny negative discriminant
        if disc < -_COEFF_NOISE * max(b * b, abs(4.0 * a * cc)):
            return []
        disc = 0.0
    s = np.sqrt(disc)
    qv = -0.5 * (b + np.copysign(s, b)) if b != 0.0 else -0.5 * s
    if qv == 0.0:
        return [0.0]
    return sorted({qv / a, cc / qv})
