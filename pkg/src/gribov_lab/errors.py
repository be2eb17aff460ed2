"""Exception hierarchy shared by every module.

The CLI maps :class:`InvalidParameter` (and plain ``ValueError``) to exit
code 2 and every :class:`NumericalFailure` to exit code 3.
"""


class GribovLabError(Exception):
    """Base class for all laboratory errors."""


class InvalidParameter(GribovLabError, ValueError):
    """A precondition on user-supplied parameters was violated."""


class DomainError(InvalidParameter):
    """Input lies outside the domain where an operation is defined."""


class StructureMismatch(InvalidParameter):
    """Matrix does not have the structure an operation relies on."""


class NumericalFailure(GribovLabError):
    """A numerical procedure could not certify its result."""


class PoleCollision(NumericalFailure):
    """A spectral parameter sits on (or too close to) a pole."""


class NoConvergence(NumericalFailure):
    """An iterative solver failed within its iteration cap."""


class QuadratureNotConverged(NumericalFailure):
    """Node doubling changed a contour integral by more than the tolerance."""


class CountMismatch(NumericalFailure):
    """Perturbed and unperturbed operators have different eigenvalue counts inside a contour."""
