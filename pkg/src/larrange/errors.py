"""Exception hierarchy shared by every stage of the pipeline."""


class ArrangementError(Exception):
    """Base class for all errors raised by larrange."""


class DimensionMismatch(ArrangementError, ValueError):
    pass


class IndexOutOfRange(ArrangementError, IndexError):
    pass


class CoefficientOverflow(ArrangementError, ArithmeticError):
    """A chain coefficient left {-1, 0, +1}; the input is incoherently oriented."""


class DegenerateEdge(ArrangementError, ValueError):
    pass


class OpenChain(ArrangementError, ValueError):
    pass


class DegenerateGeometry(ArrangementError, ValueError):
    pass


class NonManifoldInput(ArrangementError, ValueError):
    pass


class NonTerminating(ArrangementError, RuntimeError):
    pass


class NonPlanarFace(ArrangementError, ValueError):
    pass


class EmptyArrangement(ArrangementError, ValueError):
    pass


class ToleranceCollision(ArrangementError, ValueError):
    pass


class AmbiguousOuter(ArrangementError, ValueError):
    pass


class PointOnBoundary(ArrangementError, ValueError):
    pass


class ContainerNotFound(ArrangementError, RuntimeError):
    pass


class ParseError(ArrangementError, ValueError):
    pass


class ValidationError(ArrangementError, ValueError):
    pass


class UnsupportedFormat(ArrangementError, ValueError):
    pass
