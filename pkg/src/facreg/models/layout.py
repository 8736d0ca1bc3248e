"""
Layout Models for facreg

Value types for facade components and building layouts: decomposed geometric
parameters, the 4x4 component transform, and layout validation reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

Vec2 = Tuple[float, float]
Vec3 = Tuple[float, float, float]


class ComponentKind(Enum):
    """Facade component categories"""
    WINDOW = "window"
    DOOR = "door"
    BALCONY = "balcony"


@dataclass(frozen=True)
class GeomParams:
    """
    Decomposed geometric parameters of one component.

    Attributes:
        p: Horizontal coordinates of the rectangle center (meters)
        z: Elevation of the center above the building base (meters)
        w: Width (meters)
        h: Height (meters)
        n: Unit facade-plane normal
        lam: Horizontal angle of n, radians in (-pi, pi]
        theta: Elevation angle of n, radians in [-pi/2, pi/2]
    """
    p: Vec2
    z: float
    w: float
    h: float
    n: Vec3
    lam: float
    theta: float

    def with_values(self, **changes: Any) -> "GeomParams":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": list(self.p),
            "z": self.z,
            "w": self.w,
            "h": self.h,
            "normal": list(self.n),
            "lambda": self.lam,
            "theta": self.theta,
        }


@dataclass(frozen=True)
class Component:
    """A window, door or balcony placed on a facade"""
    id: str
    kind: ComponentKind
    instance_ref: str
    params: GeomParams

    def with_params(self, params: GeomParams) -> "Component":
        return replace(self, params=params)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "instance_ref": self.instance_ref,
            **self.params.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class Transform:
    """Row-major 4x4 component transform T = Translate * Rotate * Scale"""
    m: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transform):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def to_dict(self) -> Dict[str, Any]:
        return {"m": self.m.tolist()}


@dataclass(frozen=True)
class Layout:
    """
    All facade components of one building.

    Used both for the initial (detected) layout and for the regularized one.
    """
    components: Tuple[Component, ...]
    building_id: str = ""
    base_elevation: float = 0.0

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[Component]:
        return iter(self.components)

    @property
    def ids(self) -> List[str]:
        return [c.id for c in self.components]

    def by_id(self) -> Dict[str, Component]:
        return {c.id: c for c in self.components}

    def with_components(self, components: List[Component]) -> "Layout":
        return replace(self, components=tuple(components))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "building_id": self.building_id,
            "base_elevation": self.base_elevation,
            "components": [c.to_dict() for c in self.components],
        }


class IssueKind(Enum):
    """Kinds of layout invariant violations"""
    EMPTY_LAYOUT = "EmptyLayout"
    DUPLICATE_ID = "DuplicateId"
    INVALID_NORMAL = "InvalidNormal"
    INVALID_SIZE = "InvalidSize"
    ANGLE_INCONSISTENCY = "AngleInconsistency"


@dataclass(frozen=True)
class ValidationIssue:
    """One invariant violation, located by component id and field"""
    kind: IssueKind
    component_id: Optional[str]
    field: str
    message: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "component_id": self.component_id,
            "field": self.field,
            "message": self.message,
        }


@dataclass
class ValidationReport:
    """Result of validate_layout; empty iff the layout is valid"""
    issues: List[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __len__(self) -> int:
        return len(self.issues)

    def of_kind(self, kind: IssueKind) -> List[ValidationIssue]:
        return [i for i in self.issues if i.kind == kind]

    def summary(self) -> str:
        return "; ".join(
            f"{i.component_id or '<layout>'}.{i.field}: {i.message}" for i in self.issues
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "issues": [i.to_dict() for i in self.issues]}
