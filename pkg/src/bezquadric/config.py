"""Numerical tolerances shared by the whole pipeline."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances used by every geometric decision.

    All thresholds are dimensionless and are compared against the magnitude
    of the quantities entering each test, never against absolute values.

    Attributes
    ----------
    tol_infinity : float
        A homogeneous point is proper when ``|w| > tol_infinity * max|coords|``.
    tol_rank : float
        Relative singular-value / eigenvalue cut-off for rank and signature.
    tol_root : float
        Residual bound for cubic roots.
    tol_cluster : float
        Radius under which two cubic roots count as one repeated root.
    tol_lambda : float
        Pencil parameter treated as zero below this relative size.
    tol_classify : float
        Band around 1 for the canonical weight of a conic (parabola test).
    tol_center : float
        Band for the paraboloid test on the center weight and on det Z.
    tol_conic : float
        Relative residual for a point lying on a boundary conic.
    tol_compat : float
        Relative mismatch allowed between the three Moebius ratio estimates.
    tol_frame : float
        Agreement required between the two routes to the point T.
    tol_quadric : float
        Normalized implicit residual accepted on patch samples.
    tol_bary : float
        Allowed drift of ``u + v + w`` from 1.
    tol_discriminant : float
        Band for the cubic discriminant, relative to ``||coeffs||**4``.
    """

    tol_infinity: float = 1e-9
    tol_rank: float = 1e-9
    tol_root: float = 1e-10
    tol_cluster: float = 1e-6
    tol_lambda: float = 1e-9
    tol_classify: float = 1e-9
    tol_center: float = 1e-7
    tol_conic: float = 1e-8
    tol_compat: float = 1e-8
    tol_frame: float = 1e-9
    tol_quadric: float = 1e-8
    tol_bary: float = 1e-9
    tol_discriminant: float = 1e-8

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ValueError(f"{f.name} must be a positive real, got {value!r}")

    def updated(self, **overrides) -> "Tolerances":
        """Return a copy with the given fields replaced (``None`` values ignored)."""
        clean = {k: float(v) for k, v in overrides.items() if v is not None}
        unknown = set(clean) - {f.name for f in fields(self)}
        if unknown:
            raise ValueError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **clean)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = Tolerances()


def borderline(value: float, threshold: float) -> bool:
    """True when ``value`` sits within a factor 10 of ``threshold`` on either side."""
    return threshold / 10.0 < abs(value) < threshold * 10.0
