"""Quadric rational Bezier patches: implicit equation, affine type and Euclidean elements.

Typical use::

    from bezquadric import load_patch, analyze
    a = analyze(load_patch("patches/ellipsoid.yaml"))
    a.kind, a.implicit.coeffs10, a.elements.principal_planes
"""
from .canonical import (CanonicalTri, detect_ruled_degenerate, find_common_point,
                        rescale_weights, tp_to_tri)
from .classify import QuadricClass, QuadricKind, center, classify, conic_at_infinity
from .config import DEFAULT_TOL, Tolerances
from .errors import *  # noqa: F401,F403
from .estimator import QuadricPatchEstimator
from .euclid import (EuclideanElements, GramBasis, cylinder_axis, diametral_plane, gram,
                     paraboloid_vertex, principal_planes, revolution_sphere)
from .forms import (ImplicitQuadric, compute_lambda, point_form, tangential_form,
                    to_cartesian)
from .frame import QuadricFrame, build_frame, frame_degenerate
from .patch import (BoundaryConic, TPPatch, TriPatch, boundaries, eval_conic, eval_tp,
                    eval_tri, load_patch, parse_patch)
from .pipeline import QuadricAnalysis, analyze, implicitize
from .projective import HPoint, LinForm, SymForm3, SymForm4, meet3, plane_through, solve_cubic
from .report import Report, build_report

__version__ = "0.1.0"
