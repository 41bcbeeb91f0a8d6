"""End-to-end analysis of a quadric patch."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canonical import (CanonicalTri, detect_ruled_degenerate, find_common_point,
                        rescale_weights, tp_to_tri)
from .classify import QuadricClass, classify
from .config import DEFAULT_TOL, Tolerances
from .errors import DependentPlanes, Inconsistent, NoCommonPoint, NotAQuadric
from .euclid import EuclideanElements, euclidean_elements
from .forms import (ImplicitQuadric, compute_lambda, lambda_from_common_point, lambda_terms,
                    to_cartesian)
from .frame import QuadricFrame, build_frame, frame_degenerate
from .patch import TPPatch, TriPatch, sample_patch

__all__ = ["QuadricAnalysis", "analyze", "implicitize"]


@dataclass(frozen=True, eq=False)
class QuadricAnalysis:
    """Everything computed for one patch.

    ``patch`` is the triangular patch the formulas ran on; for tensor-product
    input it is the reduced triangle and ``source`` holds the original.
    ``path`` is ``"common-point"`` or ``"degenerate"`` (no common point S).
    """

    source: TriPatch | TPPatch
    patch: TriPatch
    canonical: CanonicalTri | None
    frame: QuadricFrame
    implicit: ImplicitQuadric
    klass: QuadricClass
    elements: EuclideanElements | None
    residual: float
    grid: int
    path: str
    warnings: tuple = field(default_factory=tuple)

    @property
    def kind(self):
        return self.klass.kind

    @property
    def lam(self) -> float:
        return self.klass.lam


def _canonical_frame(patch: TriPatch | TPPatch, tol: Tolerances):
    if isinstance(patch, TPPatch):
        canon = tp_to_tri(patch, tol)
        return canon.patch, canon, build_frame(canon, tol), "common-point"
    try:
        S = find_common_point(patch, tol)
    except (NoCommonPoint, DependentPlanes) as exc:
        if not detect_ruled_degenerate(patch, tol):
            raise NotAQuadric(f"no common point and no cone/cylinder structure ({exc})") from None
        return patch, None, frame_degenerate(patch, tol), "degenerate"
    canon = rescale_weights(patch, S, tol)
    return patch, canon, build_frame(canon, tol), "common-point"


def _check_lambda(frame: QuadricFrame, lam: float) -> float | None:
    """Compare lam with its direct value at S.

    The gap is measured in units of the numerator of lam, ``|dlam| D^2 / |N|_terms``,
    so that a small denominator does not amplify rounding noise.
    """
    if frame.degenerate or frame.S is None or not frame.eps_T:
        return None
    direct = lambda_from_common_point(frame)
    _, D, size = lambda_terms(frame)
    gap = abs(direct - lam) * D * D / size
    if gap > 1e-6:
        raise Inconsistent(f"pencil parameter {lam:.12g} disagrees with its value at S ({direct:.12g})")
    return gap


def implicitize(patch: TriPatch | TPPatch, tol: Tolerances = DEFAULT_TOL):
    """Frame, pencil parameter and implicit form, without classification.

    Returns ``(tri_patch, canonical, frame, implicit, path)``.
    """
    tri, canon, frame, path = _canonical_frame(patch, tol)
    lam = compute_lambda(frame, tol)
    _check_lambda(frame, lam)
    frame = frame.with_lambda(lam)
    return tri, canon, frame, to_cartesian(frame, lam=lam, tol=tol), path


def analyze(patch: TriPatch | TPPatch, tol: Tolerances = DEFAULT_TOL, grid: int = 15,
            elements: bool = True) -> QuadricAnalysis:
    """Run the full pipeline.

    Parameters
    ----------
    patch : TriPatch or TPPatch
    tol : Tolerances
    grid : int
        Side of the sample grid for the residual self-check.
    elements : bool
        Compute principal planes, axes and vertices.

    Raises
    ------
    NotAQuadric
        The patch is not on a quadric, or the implicit form fails the
        residual check on the sample grid.
    """
    tri, canon, frame, implicit, path = implicitize(patch, tol)
    samples = sample_patch(patch, grid)
    residual = float(np.max(implicit.normalized_residual(samples)))
    if residual > tol.tol_quadric:
        raise NotAQuadric(f"implicit form leaves residual {residual:.3g} on the patch")
    klass = classify(frame, frame.lam, tri, tol)
    elems = euclidean_elements(frame, klass, tol) if elements else None
    notes = list(frame.warnings) + list(klass.flags)
    if elems is not None:
        notes += list(elems.flags)
    return QuadricAnalysis(patch, tri, canon, frame, implicit, klass, elems, residual, grid,
                           path, tuple(notes))
