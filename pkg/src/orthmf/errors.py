"""Exception types raised across the package."""


class OrthMFError(Exception):
    """Base class for all package errors."""


class DegenerateForm(OrthMFError):
    pass


class NotSymmetric(OrthMFError):
    pass


class DependentRows(OrthMFError):
    pass


class NoIsotropicVectorFound(OrthMFError):
    pass


class WittRankOne(OrthMFError):
    pass


class NotIsotropic(OrthMFError):
    pass


class NotOrthogonal(OrthMFError):
    pass


class SizeCapExceeded(OrthMFError):
    pass


class NotInvariant(OrthMFError):
    pass


class ChartBoundary(OrthMFError):
    pass


class DomainExit(OrthMFError):
    pass


class NotLatticePreserving(OrthMFError):
    pass


class NotAGroup(OrthMFError):
    pass


class NotUInvariant(OrthMFError):
    """Raised by the Siegel operator; ``defect`` holds the largest residual."""

    def __init__(self, message: str, defect=None):
        super().__init__(message)
        self.defect = defect


class ComplementNotDefinite(OrthMFError):
    pass


class IdenticallyZero(OrthMFError):
    pass


class WeightMismatch(OrthMFError):
    pass


class OutOfTableRange(OrthMFError):
    pass
