"""Exception hierarchy shared by all trirg modules."""


class TrirgError(Exception):
    """Base class for all trirg errors."""


class AngleDomain(TrirgError):
    """An angle is outside (0, pi) or the three angles do not sum to pi."""


class DegenerateTriangle(TrirgError):
    """The three points are (numerically) collinear."""


class HalfPlaneDomain(TrirgError):
    """A half-plane coordinate has non-positive imaginary part."""


class IdentityViolation(TrirgError):
    """The cotangent identity residual exceeds the flatness-scaled budget."""


class NonPositiveA(TrirgError):
    """The center-vertex coefficient is not positive; decimation diverges."""


class SingularInterior(TrirgError):
    """The interior block of a stiffness matrix is not positive definite."""


class DepthExceeded(TrirgError):
    """Requested subdivision depth is above the configured cap."""


# Used by the CLI to map exceptions onto exit codes.
DOMAIN_ERRORS = (AngleDomain, DegenerateTriangle, HalfPlaneDomain, NonPositiveA,
                 DepthExceeded)
NUMERIC_ERRORS = (IdentityViolation, SingularInterior)
