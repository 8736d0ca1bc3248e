"""
Exception hierarchy for facreg.

Every error raised on purpose by the package derives from FacregError so the
CLI can tell domain failures (exit 1) from programming errors.
"""


class FacregError(Exception):
    """Base class for facreg errors"""
    pass


# ============ Geometry ============

class GeometryError(FacregError):
    """Geometric parameter error"""
    pass


class InvalidNormal(GeometryError):
    """Normal vector is zero or not unit length"""
    pass


class InvalidSize(GeometryError):
    """Width or height is not strictly positive"""
    pass


class InvalidTransform(GeometryError):
    """Matrix does not decompose as translation * rotation * scale"""
    pass


# ============ Attribute spaces ============

class AttributeSpaceError(FacregError):
    """Attribute space construction error"""
    pass


class EmptyAttribute(AttributeSpaceError):
    """No values to cluster"""
    pass


class SpaceMismatch(AttributeSpaceError):
    """Model spaces do not fit the layout they are used with"""
    pass


# ============ Logic encoding ============

class LogicError(FacregError):
    """Logical operator encoding error"""
    pass


class ArityError(LogicError):
    """Gate called with the wrong number of inputs"""
    pass


class AttributeMismatch(LogicError):
    """Selection vectors come from different attribute spaces"""
    pass


class EmptyArgument(LogicError):
    """Operator called with no selection vectors"""
    pass


# ============ Solver ============

class SolverError(FacregError):
    """BIP solver error"""
    pass


class TooLarge(SolverError):
    """Model has too many free variables for exhaustive enumeration"""
    pass


class PartialAssignment(SolverError):
    """Assignment does not cover every variable"""
    pass


# ============ Regularization / evaluation ============

class RegularizationError(FacregError):
    """Regularization pipeline error"""
    pass


class NoSolution(RegularizationError):
    """Solver returned no assignment to decode"""
    pass


class EvaluationError(FacregError):
    """Layout evaluation error"""
    pass


class UnmatchedComponent(EvaluationError):
    """Layout component has no ground-truth counterpart"""
    pass


# ============ I/O ============

class ParseError(FacregError):
    """Layout or report file could not be parsed"""
    pass


class ConfigError(FacregError):
    """Configuration file is invalid"""
    pass


class InvalidSpec(FacregError):
    """Invalid synthetic grid parameters"""
    pass
