"""Exception hierarchy shared by every module of the package."""


class GeometryError(ValueError):
    """Base class for all domain validation failures."""


class NonPositiveCoordinate(GeometryError):
    pass


class DimensionTooSmall(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class NotZeroSum(GeometryError):
    pass


class OverflowGuard(GeometryError):
    pass


class PointOutsidePolytope(GeometryError):
    pass


class NotSymmetric(GeometryError):
    pass


class NotPositiveDefinite(GeometryError):
    pass


class NotCorrelation(GeometryError):
    pass


class FactorizationFailure(GeometryError):
    pass


class DegenerateLine(GeometryError):
    pass


class ToleranceNotReached(GeometryError):
    pass


class EmptyInput(GeometryError):
    pass


class NotEnoughDistinctPoints(GeometryError):
    pass


class DegenerateDraw(GeometryError):
    pass


class LengthMismatch(GeometryError):
    pass


class UnknownSuite(GeometryError):
    pass


class UnknownMetric(GeometryError):
    pass
