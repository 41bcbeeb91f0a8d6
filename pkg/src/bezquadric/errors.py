"""Exception hierarchy.

``InputError`` subclasses signal malformed input (CLI exit code 1),
``NotAQuadric`` subclasses signal a valid patch that does not lie on a quadric
(exit code 2). Everything else is a numerical inconsistency.
"""


class QuadricError(Exception):
    """Base class for all errors raised by the package."""


class InputError(QuadricError, ValueError):
    """Malformed or unusable input data."""


class ParseError(InputError):
    """A patch document could not be parsed."""


class InvalidPatch(InputError):
    """A control net violates the patch invariants."""


class ZeroDenominator(InputError):
    """A rational evaluation hit a vanishing denominator."""


class CollinearInput(QuadricError):
    """Three points do not span a plane."""


class DependentPlanes(QuadricError):
    """Three planes do not meet in a single point."""


class DependentForms(QuadricError):
    """The four frame planes are linearly dependent."""


class DegeneratePolynomial(QuadricError):
    """A polynomial with no nonconstant term was passed to a root finder."""


class NotAQuadric(QuadricError):
    """The patch does not lie on a quadric."""


class NoCommonPoint(QuadricError):
    """The boundary conics share no common point."""


class NoSecondIntersection(QuadricError):
    """Two boundary conics of a tensor-product patch meet only at the corner."""


class DegenerateFrame(QuadricError):
    """A frame plane or point is undefined."""


class InconsistentFrame(QuadricError):
    """Two independent computations of a frame element disagree."""


class Inconsistent(QuadricError):
    """The center test and the det Z test contradict each other."""


class DegenerateBasis(QuadricError):
    """The Euclidean basis vectors of the frame are dependent."""


class InconsistentDetection(QuadricError):
    """Root clustering and the discriminant disagree on a repeated root."""


class NotAParaboloid(QuadricError):
    """A paraboloid-only element was requested for another quadric."""


class NotACylinder(QuadricError):
    """A cylinder-only element was requested for another quadric."""
