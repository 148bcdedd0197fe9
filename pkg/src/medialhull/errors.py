"""Exception hierarchy shared by every module."""


class MedialHullError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateInput(MedialHullError, ValueError):
    """Too few distinct points, or all points collinear."""


class EmptyIntersection(MedialHullError):
    """The convex hull of a district does not meet its state at all."""


class ZeroHullAxis(MedialHullError):
    """The hull axis has zero length, so the ratio is undefined."""


class InvalidRatio(MedialHullError, ValueError):
    pass


class EmptyInput(MedialHullError, ValueError):
    pass


class SeedOutsideDistrict(MedialHullError, ValueError):
    pass


class NoValidSeeds(MedialHullError, ValueError):
    pass


class OutOfDomain(MedialHullError, ValueError):
    """Coordinates outside the domain of the projection."""


class ParseError(MedialHullError, ValueError):
    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedGeometry(ParseError):
    pass


class BadMagic(ParseError):
    pass


class ShapeTypeUnsupported(ParseError):
    pass


class RecordLengthMismatch(ParseError):
    pass
