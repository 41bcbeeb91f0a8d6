"""scikit-learn style estimator wrapping the analysis pipeline."""
from __future__ import annotations

import os

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .config import DEFAULT_TOL, Tolerances
from .patch import TPPatch, TriPatch, load_patch, parse_patch
from .pipeline import analyze
from .report import build_report

__all__ = ["QuadricPatchEstimator", "as_patch"]


def as_patch(X, weights=None) -> TriPatch | TPPatch:
    """Coerce a patch, a patch document, a file path or a control-point array.

    Arrays of shape ``(6, 3)`` are triangular nets in row order, ``(3, 3, 3)``
    tensor-product nets; ``weights`` defaults to all ones.
    """
    if isinstance(X, (TriPatch, TPPatch)):
        return X
    if isinstance(X, dict):
        return parse_patch(X)
    if isinstance(X, (str, os.PathLike)):
        return load_patch(X)
    pts = np.asarray(X, dtype=float)
    if pts.shape == (6, 3):
        w = np.ones(6) if weights is None else np.asarray(weights, dtype=float).reshape(6)
        return TriPatch(pts, w)
    if pts.shape in ((3, 3, 3), (9, 3)):
        w = np.ones((3, 3)) if weights is None else np.asarray(weights, dtype=float).reshape(3, 3)
        return TPPatch(pts.reshape(3, 3, 3), w)
    raise ValueError(f"cannot interpret control points of shape {pts.shape}")


class QuadricPatchEstimator(BaseEstimator, TransformerMixin):
    """Fit the quadric carrying a rational quadratic patch.

    Parameters
    ----------
    tolerances : Tolerances or dict, optional
        Overrides of the default tolerances.
    grid : int, default 15
        Side of the sample grid used for the residual self-check.
    elements : bool, default True
        Also compute principal planes, axes and vertices.

    Attributes
    ----------
    analysis_ : QuadricAnalysis
    kind_ : QuadricKind
    lambda_ : float
        Pencil parameter.
    coef_ : ndarray of shape (10,)
        Normalized implicit coefficients, monomials ``x^2, y^2, z^2, xy, xz,
        yz, x, y, z, 1``.
    center_ : ndarray of shape (4,)
        Homogeneous center (a direction for paraboloids).
    frame_ : QuadricFrame
    elements_ : EuclideanElements or None
    residual_ : float
        Largest normalized residual on the sample grid.

    Examples
    --------
    >>> est = QuadricPatchEstimator().fit("patches/ellipsoid.yaml")  # doctest: +SKIP
    >>> est.kind_.value                                               # doctest: +SKIP
    'Ellipsoid'
    """

    def __init__(self, tolerances=None, grid: int = 15, elements: bool = True):
        self.tolerances = tolerances
        self.grid = grid
        self.elements = elements

    def _tol(self) -> Tolerances:
        if self.tolerances is None:
            return DEFAULT_TOL
        if isinstance(self.tolerances, Tolerances):
            return self.tolerances
        return DEFAULT_TOL.updated(**dict(self.tolerances))

    def fit(self, X, y=None, weights=None):
        """Analyze the patch ``X``; ``y`` is ignored."""
        a = analyze(as_patch(X, weights), self._tol(), self.grid, self.elements)
        self.analysis_ = a
        self.kind_ = a.kind
        self.lambda_ = a.lam
        self.coef_ = np.array(a.implicit.coeffs10)
        self.center_ = None if a.klass.center is None else np.array(a.klass.center.coords)
        self.frame_ = a.frame
        self.elements_ = a.elements
        self.residual_ = a.residual
        return self

    def _points(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[-1] != 3:
            raise ValueError("expected Cartesian points with 3 columns")
        return X

    def transform(self, X) -> np.ndarray:
        """Frame coordinates ``(p, q, r, t)`` of Cartesian points."""
        check_is_fitted(self, "frame_")
        X = self._points(X)
        Xh = np.hstack([X, np.ones((len(X), 1))])
        return Xh @ self.frame_.forms.T

    def decision_function(self, X) -> np.ndarray:
        """Signed normalized implicit value ``F(X) / (||coef|| (1 + ||X||^2))``."""
        check_is_fitted(self, "coef_")
        X = self._points(X)
        F = self.analysis_.implicit(X)
        return F / (np.linalg.norm(self.coef_) * (1.0 + np.sum(X * X, axis=1)))

    def predict(self, X) -> np.ndarray:
        """Whether each point lies on the quadric (within ``tol_quadric``)."""
        return np.abs(self.decision_function(X)) <= self._tol().tol_quadric

    def score(self, X, y=None) -> float:
        """Fraction of points lying on the quadric."""
        return float(np.mean(self.predict(X)))

    def report(self):
        """Serializable :class:`~bezquadric.report.Report` of the fit."""
        check_is_fitted(self, "analysis_")
        return build_report(self.analysis_)
