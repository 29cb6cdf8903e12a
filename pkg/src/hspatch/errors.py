"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for geometry kernel failures."""


class SingularMatrixError(GeometryError):
    """Matrix inversion was requested for a (numerically) singular matrix."""


class BasisMismatchError(GeometryError):
    """An operation received a patch in a basis it does not accept."""


class InfeasiblePatchError(GeometryError):
    """Strict patch construction hit input that violates the tangent constraint.

    Carries the per-coordinate constraint reports so callers can show which
    coordinate failed and by how much.
    """

    def __init__(self, message, reports=None):
        super().__init__(message)
        self.reports = reports or {}


class DocumentError(ValueError):
    """A patch-set or teapot document failed to parse or validate."""
