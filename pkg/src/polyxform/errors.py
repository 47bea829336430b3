"""Exception hierarchy shared by all polyxform modules."""


class PolyxformError(Exception):
    """Base class for every error raised by the library."""


class DimensionError(PolyxformError, ValueError):
    """Operands have incompatible lengths or shapes."""


class DomainError(PolyxformError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class DegeneracyError(PolyxformError, ValueError):
    """A matrix or vector system that must be nonsingular is (numerically) singular."""


class AdmissibilityError(PolyxformError):
    """An index family fails a condition required by the requested operation.

    ``condition`` names the first failed condition.
    """

    def __init__(self, condition, message=None):
        self.condition = condition
        super().__init__(message or f"index family fails the {condition} condition")


class PreconditionError(PolyxformError, ValueError):
    pass


class CertificationError(PolyxformError):
    """A test function could not be certified to satisfy its derivative bound."""


class CoverageError(PolyxformError):
    """A Monte Carlo sampling box does not cover the integrand's support."""


class FitError(PolyxformError, ValueError):
    pass
