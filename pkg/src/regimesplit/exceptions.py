"""Exception hierarchy shared by every module."""


class RegimeSplitError(Exception):
    """Base class for all errors raised by regimesplit."""


class DomainError(RegimeSplitError, ValueError):
    """Invalid parameters or arguments outside an operation's domain."""


class NonIntegrable(RegimeSplitError, ArithmeticError):
    """Adaptive quadrature diverged or ran out of subdivisions."""


class DegenerateRegime(RegimeSplitError, ArithmeticError):
    """One of the two regimes carries (numerically) zero probability."""


class NotLogConcave(RegimeSplitError):
    """The log-concave fast path was requested for a law that fails the probe."""


class BracketFailure(RegimeSplitError, ArithmeticError):
    """No sign change of the stationarity gap inside the search range."""


class EigenFailure(RegimeSplitError, ArithmeticError):
    """The Jacobi eigensolver hit its sweep cap before converging."""


class ConsistencyError(RegimeSplitError, AssertionError):
    """Two independent routes to the same quantity disagree."""


class DegeneratePolygon(RegimeSplitError, ValueError):
    """Polygon with zero area or a non-convex / clockwise vertex list."""


class DegenerateCut(RegimeSplitError, ArithmeticError):
    """A vertical cut leaves one side of the polygon with zero area."""
