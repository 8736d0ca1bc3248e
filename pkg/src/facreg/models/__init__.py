"""
facreg Models

Value types for layouts, attribute spaces and 0-1 programs.
"""

from .layout import (
    ComponentKind,
    GeomParams,
    Component,
    Transform,
    Layout,
    IssueKind,
    ValidationIssue,
    ValidationReport,
)

from .spaces import (
    Attribute,
    Metric,
    AttributeSpace,
    ModelSpaces,
    GEOMETRIC_ATTRIBUTES,
    STATS_ORDER,
)

from .bip import (
    Var,
    Relation,
    LinearConstraint,
    LinearExpression,
    SelectionVector,
    BipModel,
    SolveStatus,
    SolveStats,
    Solution,
    FeasibilityReport,
)

__all__ = [
    # Layout models
    "ComponentKind",
    "GeomParams",
    "Component",
    "Transform",
    "Layout",
    "IssueKind",
    "ValidationIssue",
    "ValidationReport",
    # Attribute spaces
    "Attribute",
    "Metric",
    "AttributeSpace",
    "ModelSpaces",
    "GEOMETRIC_ATTRIBUTES",
    "STATS_ORDER",
    # BIP models
    "Var",
    "Relation",
    "LinearConstraint",
    "LinearExpression",
    "SelectionVector",
    "BipModel",
    "SolveStatus",
    "SolveStats",
    "Solution",
    "FeasibilityReport",
]
